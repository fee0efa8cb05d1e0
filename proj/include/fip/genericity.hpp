#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fip/core.hpp"
#include "fip/family.hpp"

namespace fip {

/**
 * Canonical bijection between an initial segment of the naturals and the
 * strings over a bounded alphabet of bounded length, ordered by length
 * then lexicographically. The window parameters (max_len, alphabet) are
 * explicit truncation bounds: the coding is total and bijective on the
 * window, and every golden output depends on it bit-exactly.
 */
class Coding {
 public:
  Coding(Nat max_len, Nat alphabet);

  /// Window sized for a family: alphabet covers indices and witness
  /// bounds, length covers index chains with slack.
  static Coding for_family(const Family& family);

  Nat max_len() const { return max_len_; }
  Nat alphabet() const { return alphabet_; }
  Nat window_size() const { return window_; }

  std::vector<Nat> decode(Nat code) const;
  Nat encode(std::span<const Nat> s) const;
  /// First code of the strings of the given length.
  Nat block_start(Nat length) const;

 private:
  Nat max_len_;
  Nat alphabet_;
  Nat window_;
  std::vector<Nat> block_start_;
};

/// A binary string stored sparsely: total length plus the positions of
/// its ones (strictly ascending). Positions range over the coding window,
/// far beyond anything an explicit bit vector could hold.
struct BitString {
  Nat length = 0;
  std::vector<Nat> ones;

  bool bit(Nat n) const;
  BitString prefix(Nat t) const;
  void append_one_at(Nat position);  // zero-fill up to position, then a one
};

struct AcceptableEntry {
  Nat position = 0;
  std::vector<Nat> tau;
  Nat bound = 0;
  Nat witness = 0;  // the element <= bound certifying the intersection
};

struct AcceptableNumbers {
  std::vector<AcceptableEntry> entries;
  std::vector<Nat> undecidable;  // positions whose witness check hit the truncation
};

/// Positions n < |sigma| with sigma(n) = 1 whose code tau·b carries a
/// verified witness: some x <= b lies in every A_tau(m).
AcceptableNumbers acceptable_numbers(const BitString& sigma, const Family& family,
                                     const Coding& coding);

struct AcceptableSequence {
  std::vector<AcceptableEntry> entries;  // greedy chain, tau's strictly extending
  bool empty() const { return entries.empty(); }
  const std::vector<Nat>& final_tau() const { return entries.back().tau; }
};

/// The greedy-least chain: n_0 the least acceptable position, each
/// successor the least acceptable position beyond whose witness string
/// strictly extends the previous one. Monotone under extension of sigma.
AcceptableSequence acceptable_sequence(const BitString& sigma, const Family& family,
                                       const Coding& coding);

struct DenseSetQuery {
  Nat index = 0;
  Nat budget = 0;  // witness-search bound for the emptiness clause
};

struct DenseVerdict {
  bool member = false;
  enum class Via { Enumerates, EmptyAtBudget, NotMember } via = Via::NotMember;
  /// The emptiness clause is exact on the truncation only when the budget
  /// reaches the universe bound; below that it is one-sided.
  bool truncation_exact = false;
};

/// sigma is in D_i iff its acceptable sequence is nonempty and the final
/// witness string either enumerates i or cannot be extended by A_i within
/// the budget.
DenseVerdict dense_membership(const DenseSetQuery& query, const BitString& sigma,
                              const Family& family, const Coding& coding);

struct GenericBuildResult {
  BitString g;
  /// Target index paired with the prefix length at which it was met.
  std::vector<std::pair<Nat, Nat>> met_at;
};

/// Finite stand-in for a generic sequence: meets every target dense set
/// by iterated least-extension search (least new one-position whose code
/// keeps the chain growing and satisfies the target).
GenericBuildResult build_generic(const Family& family, const Coding& coding,
                                 std::span<const DenseSetQuery> targets);

struct SubfamilyExtraction {
  IndexMap j;
  std::vector<std::vector<Nat>> tau_chain;       // final witness strings, extending
  std::vector<WitnessCertificate> prefix_certs;  // per prefix of j
  std::vector<Nat> met_targets;                  // indices whose dense sets some prefix meets
  MaximalityVerdict maximality;                  // among met targets
};

/// Reads the subfamily out of a generic string: the union of the final
/// witness strings across prefixes. Maximality is claimed (and checked)
/// only for the indices whose dense sets were met.
SubfamilyExtraction extract_subfamily(const BitString& g, const Family& family,
                                      const Coding& coding);

}  // namespace fip
