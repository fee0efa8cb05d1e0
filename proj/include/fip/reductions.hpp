#pragma once

#include <span>
#include <vector>

#include "fip/core.hpp"
#include "fip/family.hpp"
#include "fip/family_io.hpp"

namespace fip {

/**
 * Result of the hat transform: the derived family in which full
 * intersections mirror n-wise intersections of the source. The derived
 * family obeys the marker convention and is decided on a gap-free initial
 * segment of the odd numbers.
 *
 * Fresh odd codes come from one global counter rather than per-stage
 * arithmetic, so parallel triggers never collide; the counter's final
 * value fixes the universe bound.
 */
struct HatTransform {
  Family target;
  Nat n = 2;
  Nat stages_run = 0;
  Nat next_odd = 1;

  /// Index sets whose n-subsets are all witnessed in the source but which
  /// received no common element within the stage budget. Empty when the
  /// budget sufficed (stages > max(universe_bound, index_bound - 1)).
  std::vector<std::vector<Nat>> unwitnessed;
};

/// Derived family where an index set has a common element exactly when
/// all its n-subsets have common elements in the source. Every subset of
/// size >= n whose n-subsets are witnessed by stage s receives a fresh
/// odd common element at stage s.
HatTransform hat_transform(const Family& a, Nat n, Nat stages);

/// Variant where only subsets of size exactly n+1 trigger fresh common
/// elements: the reduction family from (n+1)-wise to n-wise intersection.
HatTransform hat_transform_bounded(const Family& a, Nat n, Nat stages);

/**
 * Transfers a maximal full-intersection solution on the derived family
 * back to the source as an n-wise solution. The chosen set must be
 * maximal in `hat` (checked); the returned set passing both the n-wise
 * property and maximality on the source truncation is a postcondition,
 * violations of which are bugs, not input conditions.
 */
std::vector<Nat> pull_back_solution(const Family& a, const Family& hat,
                                    std::span<const Nat> hat_chosen, Nat n);

/// The family encoding a finite function's range: A_i = {2i} union
/// {2a+1 : exists b <= a with f(b) = i}. An index is in the range exactly
/// when its set is not a singleton.
Family encode_range(const FunctionTable& table, Nat index_bound = 0, Nat universe_bound = 0);

struct RangeDecode {
  /// For F / Dbar_n: indices whose sets occur extensionally in the chosen
  /// solution. For D_n: indices whose sets do not.
  std::vector<Nat> decoded;
  /// D_n only: the <= n-1 non-singleton indices inside the solution. The
  /// biconditional is silent about these, so they are reported as data.
  std::vector<Nat> exceptions;
};

/// Reads the encoded range off a maximal solution. The solution must be
/// maximal for `prop` (checked); for F / Dbar_n it must contain at least
/// one non-singleton set (lone marker-singleton solutions are degenerate
/// and rejected).
RangeDecode decode_range(const Family& family, std::span<const Nat> chosen,
                         const IntersectionProperty& prop);

}  // namespace fip
