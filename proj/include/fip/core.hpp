#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fip/family.hpp"

namespace fip {

/**
 * Verdict of a property check on a family truncation. Outcome is
 * three-valued: a check that runs into an undecided element reports
 * Undecided rather than guessing, and says where.
 */
struct PropertyVerdict {
  enum class Outcome { Holds, Fails, Undecided };
  Outcome outcome = Outcome::Undecided;

  /// For Dbar_n / F when the property holds: one certificate per
  /// checked subset of distinct sets.
  std::vector<WitnessCertificate> certificates;

  /// For failure: the offending subset, and for D_n the common element
  /// that should not exist.
  std::optional<std::vector<Nat>> counterexample;
  std::optional<Nat> counterexample_witness;

  /// For Undecided: the first (index, element) encountered undecided.
  std::optional<std::pair<Nat, Nat>> undecided_at;

  bool holds() const { return outcome == Outcome::Holds; }
};

struct MaximalityVerdict {
  enum class Outcome { Maximal, Extendable, ChosenInvalid, Undecided };
  Outcome outcome = Outcome::Undecided;

  /// Least index whose set extends the chosen subfamily, when Extendable.
  std::optional<Nat> extending_index;

  /// Detail when the chosen subfamily itself fails the property.
  PropertyVerdict chosen_check;

  bool maximal() const { return outcome == Outcome::Maximal; }
};

struct IndexRecovery {
  enum class Status { Ok, MarkerUndecided, Malformed };
  Status status = Status::Ok;
  Nat index = 0;  // meaningful only when Ok
  std::string detail;
};

/// Extensional distinctness on the decided universe: true iff some
/// element <= universe_bound is decided differently in A_i and A_j.
bool distinct(const Family& family, Nat i, Nat j);

/// Checks the intersection property over all relevant subsets of
/// pairwise-distinct indices below index_bound. Requires the family fully
/// decided on the truncation; otherwise reports Undecided.
PropertyVerdict check_property(const Family& family, const IntersectionProperty& prop);

/**
 * Property check restricted to a chosen index set: subsets range over
 * `chosen` only. Used both by is_maximal and by solver postconditions.
 */
PropertyVerdict check_property_on(const Family& family, std::span<const Nat> chosen,
                                  const IntersectionProperty& prop);

/**
 * Is `chosen` maximal with `prop` among `candidates` (default: all indices
 * below index_bound)? An index extends the subfamily only if its set is
 * extensionally new to it and the property survives the addition. Returns
 * the least extending index otherwise.
 */
MaximalityVerdict is_maximal(const Family& family, std::span<const Nat> chosen,
                             const IntersectionProperty& prop,
                             std::span<const Nat> candidates = {});

/// Recover j from a marker-convention set via its unique even member 2j.
IndexRecovery subfamily_index_of(const StagedSet& b);

/// Check the marker convention for A_i: 2i decided in, 2j decided out for
/// all other j with 2j <= universe_bound, all other decided-in elements odd.
/// Returns a human-readable violation, or nullopt if the convention holds.
std::optional<std::string> marker_violation(const Family& family, Nat i);

/// Least common decided-in element of the given sets, up to
/// universe_bound. Throws TruncationError if the answer depends on an
/// undecided membership.
std::optional<Nat> least_common_element(const Family& family, std::span<const Nat> indices);

}  // namespace fip
