#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "fip/family.hpp"

namespace fip {

/**
 * Sparse family under stage construction, with the marker convention baked
 * in: A_i always contains 2i, never any other even number, and otherwise
 * only odd numbers enumerated by explicit actions. Every enumeration is
 * stage-tagged, so membership can be queried both at the current state and
 * as of the end of any earlier stage. A global monotone frontier records
 * totalization: every odd n <= frontier not enumerated into a set is out
 * of it.
 */
class ConstructionFamily {
 public:
  struct Enumeration {
    Nat value;
    Nat stage;
  };

  /// Current-state membership.
  Membership membership(Nat i, Nat n) const { return membership_at(i, n, kNoStageBound); }

  /// Membership as of the end of the given stage.
  Membership membership_at(Nat i, Nat n, Nat stage) const;

  /// Enumerate odd n into A_i at the given stage.
  void put_in(Nat i, Nat n, Nat stage);

  /// Raise the totalization frontier at the given stage.
  void raise_frontier(Nat f, Nat stage);

  Nat frontier() const { return frontier_history_.empty() ? 0 : frontier_history_.back().second; }
  Nat frontier_at(Nat stage) const;

  /// Least decided-in element of A_i as of end of `stage` (the marker 2i
  /// counts), restricted to values <= bound.
  std::optional<Nat> least_element_at(Nat i, Nat stage, Nat bound) const;

  /// Least value <= bound decided into both A_i and A_j by end of `stage`.
  std::optional<Nat> pair_witness_at(Nat i, Nat j, Nat stage, Nat bound) const;

  /// Least current common element of the given sets (no value bound).
  std::optional<Nat> common_element(std::span<const Nat> indices) const;

  /// Indices that carry at least one enumerated odd element.
  std::vector<Nat> touched_indices() const;

  const std::vector<Enumeration>* enumerations(Nat i) const;

  /// Largest number that has appeared as an index or element.
  Nat high_water() const { return high_water_; }
  void note_number(Nat n) {
    if (n > high_water_) high_water_ = n;
  }

  /// Export the truncation below the given bounds as a dense Family.
  /// Elements beyond the frontier are omitted (the trace carries them).
  Family materialize(Nat index_bound, Nat universe_bound) const;

  bool operator==(const ConstructionFamily& other) const;

 private:
  static constexpr Nat kNoStageBound = ~Nat{0};

  std::map<Nat, std::vector<Enumeration>> sets_;  // odd enumerations, by value
  std::vector<std::pair<Nat, Nat>> frontier_history_;  // (stage, frontier), both increasing
  Nat high_water_ = 0;
};

}  // namespace fip
