#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fip {

using Nat = std::uint64_t;

/// Raised on malformed user input (files, CLI arguments, out-of-range
/// indices). Maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a question cannot be answered at the current truncation
/// (an element is undecided where a verdict needs it). Maps to exit code 3.
class TruncationError : public std::runtime_error {
 public:
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

/// Internal invariant breakage: a postcondition that is a bug, not an
/// input condition.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

enum class Membership { In, Out, Undecided };

/**
 * A set of naturals revealed by a monotone stage enumeration.
 *
 * Decisions are tri-state: an element is decided in, decided out, or
 * undecided. Advancing never retracts a decision. Storage is a sorted
 * in-list, a sorted explicit out-list, and an optional frontier F meaning
 * "every n <= F not decided in is decided out" (how fully-decided
 * truncations and stage totalization are represented without listing the
 * complement).
 */
class StagedSet {
 public:
  StagedSet() = default;
  explicit StagedSet(Nat index) : index_(index) {}

  Nat index() const { return index_; }
  Nat stage() const { return stage_; }
  void advance_stage(Nat s);

  Membership membership(Nat n) const;
  bool contains(Nat n) const { return membership(n) == Membership::In; }

  /// Decide n into the set. No-op if already in; throws ContractViolation
  /// if n is decided out.
  void put_in(Nat n);
  /// Decide n out of the set. No-op if already out; throws on conflict.
  void put_out(Nat n);
  /// Decide out every undecided n <= f.
  void raise_frontier(Nat f);

  const std::vector<Nat>& decided_in() const { return in_; }
  const std::vector<Nat>& decided_out_explicit() const { return out_; }
  std::optional<Nat> out_frontier() const { return frontier_; }

  /// Least decided-in element, if any.
  std::optional<Nat> least_element() const;

  bool empty_decided() const { return in_.empty(); }

 private:
  Nat index_ = 0;
  Nat stage_ = 0;
  std::vector<Nat> in_;
  std::vector<Nat> out_;
  std::optional<Nat> frontier_;
};

/**
 * An indexed sequence of staged sets with explicit truncation bounds:
 * indices below index_bound, universe elements up to universe_bound.
 * Every verdict computed from a family is relative to these bounds.
 */
class Family {
 public:
  Family() = default;
  Family(Nat index_bound, Nat universe_bound);

  Nat index_bound() const { return sets_.size(); }
  Nat universe_bound() const { return universe_bound_; }
  void set_universe_bound(Nat u) { universe_bound_ = u; }

  const StagedSet& set(Nat i) const;
  StagedSet& set_mutable(Nat i);

  Membership membership(Nat i, Nat n) const { return set(i).membership(n); }

  void set_nontrivial_witness(Nat i, Nat a);
  std::optional<std::pair<Nat, Nat>> nontrivial_witness() const { return witness_; }

  /// Least (i, a) with a decided into A_i, scanning indices then elements.
  std::optional<std::pair<Nat, Nat>> find_nontrivial_witness() const;
  bool nontrivial() const { return find_nontrivial_witness().has_value(); }

  /// First (i, n) with n <= universe_bound undecided in A_i, if any.
  std::optional<std::pair<Nat, Nat>> first_undecided() const;
  bool fully_decided() const { return !first_undecided().has_value(); }

 private:
  std::vector<StagedSet> sets_;
  Nat universe_bound_ = 0;
  std::optional<std::pair<Nat, Nat>> witness_;
};

/// A total map J: the subfamily <A_J(0), A_J(1), ...> of its target,
/// materialized as a finite prefix. Entries may repeat.
struct IndexMap {
  std::vector<Nat> entries;

  /// Distinct entries in ascending order.
  std::vector<Nat> range() const;
};

/// A finite index set F together with an element a certifying
/// a in the intersection of A_i over i in F, at the stage it was issued.
struct WitnessCertificate {
  std::vector<Nat> indices;  // sorted
  Nat witness = 0;
};

/// Which intersection behaviour a subfamily is asked to have: every n
/// distinct sets intersect emptily (D_n), nonemptily (Dbar_n), or every
/// finite collection of >= 2 distinct sets intersects nonemptily (F).
struct IntersectionProperty {
  enum class Kind { EmptyN, NonemptyN, AllFinite };
  Kind kind = Kind::AllFinite;
  Nat n = 2;

  static IntersectionProperty d(Nat n);
  static IntersectionProperty dbar(Nat n);
  static IntersectionProperty f();

  std::string name() const;
  static IntersectionProperty parse(const std::string& text);
};

bool operator==(const WitnessCertificate& a, const WitnessCertificate& b);
bool operator==(const IntersectionProperty& a, const IntersectionProperty& b);

}  // namespace fip
