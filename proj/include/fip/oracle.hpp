#pragma once

#include <vector>

#include "fip/core.hpp"
#include "fip/family.hpp"

namespace fip {

/**
 * Ground-truth oracle for maximal subfamilies: enumerates every index
 * subset below index_bound, filters by the intersection property, and
 * keeps the ones no extensionally-new index extends. Exponential, so the
 * index bound is guarded. Deliberately shares no code path with the
 * solvers and checkers it validates: sets are flattened to bit rows and
 * the properties are decided on those, with the F property decided via
 * the whole-intersection shortcut rather than subset enumeration.
 */
std::vector<std::vector<Nat>> brute_force_maximal(const Family& family,
                                                  const IntersectionProperty& prop,
                                                  Nat index_guard = 12);

/// Same flattened route, exposed for cross-checking single subsets.
bool brute_force_satisfies(const Family& family, std::span<const Nat> chosen,
                           const IntersectionProperty& prop);

}  // namespace fip
