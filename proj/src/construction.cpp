#include "fip/construction.hpp"

#include <algorithm>

namespace fip {

Membership ConstructionFamily::membership_at(Nat i, Nat n, Nat stage) const {
  if (n % 2 == 0) return n == 2 * i ? Membership::In : Membership::Out;
  auto it = sets_.find(i);
  if (it != sets_.end()) {
    for (const Enumeration& e : it->second) {
      if (e.value > n) break;
      if (e.value == n && e.stage <= stage) return Membership::In;
    }
  }
  if (n <= frontier_at(stage)) return Membership::Out;
  return Membership::Undecided;
}

void ConstructionFamily::put_in(Nat i, Nat n, Nat stage) {
  if (n % 2 == 0) throw ContractViolation("constructions enumerate only odd numbers");
  if (membership(i, n) == Membership::Out)
    throw ContractViolation("element " + std::to_string(n) + " already out of set " +
                            std::to_string(i));
  auto& enums = sets_[i];
  auto it = std::lower_bound(enums.begin(), enums.end(), n,
                             [](const Enumeration& e, Nat v) { return e.value < v; });
  if (it != enums.end() && it->value == n) return;
  enums.insert(it, Enumeration{n, stage});
  note_number(i);
  note_number(n);
}

void ConstructionFamily::raise_frontier(Nat f, Nat stage) {
  if (!frontier_history_.empty()) {
    auto& [last_stage, last_f] = frontier_history_.back();
    if (f <= last_f) return;
    if (stage < last_stage) throw ContractViolation("frontier stage must be monotone");
    if (stage == last_stage) {
      last_f = f;
      note_number(f);
      return;
    }
  }
  frontier_history_.emplace_back(stage, f);
  note_number(f);
}

Nat ConstructionFamily::frontier_at(Nat stage) const {
  Nat f = 0;
  for (const auto& [s, value] : frontier_history_) {
    if (s > stage) break;
    f = value;
  }
  return f;
}

std::optional<Nat> ConstructionFamily::least_element_at(Nat i, Nat stage, Nat bound) const {
  std::optional<Nat> least;
  if (2 * i <= bound) least = 2 * i;
  auto it = sets_.find(i);
  if (it != sets_.end()) {
    for (const Enumeration& e : it->second) {
      if (e.value > bound) break;
      if (e.stage <= stage) {
        if (!least || e.value < *least) least = e.value;
        break;  // enumerations sorted by value
      }
    }
  }
  return least;
}

std::optional<Nat> ConstructionFamily::pair_witness_at(Nat i, Nat j, Nat stage, Nat bound) const {
  if (i == j) return least_element_at(i, stage, bound);
  auto ia = sets_.find(i);
  auto ib = sets_.find(j);
  if (ia == sets_.end() || ib == sets_.end()) return std::nullopt;
  const auto& a = ia->second;
  const auto& b = ib->second;
  std::size_t x = 0, y = 0;
  while (x < a.size() && y < b.size()) {
    if (a[x].value > bound || b[y].value > bound) return std::nullopt;
    if (a[x].value == b[y].value) {
      if (a[x].stage <= stage && b[y].stage <= stage) return a[x].value;
      ++x;
      ++y;
    } else if (a[x].value < b[y].value) {
      ++x;
    } else {
      ++y;
    }
  }
  return std::nullopt;
}

std::optional<Nat> ConstructionFamily::common_element(std::span<const Nat> indices) const {
  if (indices.empty()) return std::nullopt;
  bool all_same = true;
  for (Nat i : indices)
    if (i != indices.front()) all_same = false;
  if (all_same) return least_element_at(indices.front(), kNoStageBound, ~Nat{0});

  // Distinct indices share only odd elements; scan the first distinct
  // set's enumerations.
  auto it = sets_.find(indices.front());
  if (it == sets_.end()) return std::nullopt;
  for (const Enumeration& e : it->second) {
    bool common = true;
    for (Nat i : indices) {
      if (membership(i, e.value) != Membership::In) {
        common = false;
        break;
      }
    }
    if (common) return e.value;
  }
  return std::nullopt;
}

std::vector<Nat> ConstructionFamily::touched_indices() const {
  std::vector<Nat> out;
  out.reserve(sets_.size());
  for (const auto& [i, enums] : sets_)
    if (!enums.empty()) out.push_back(i);
  return out;
}

const std::vector<ConstructionFamily::Enumeration>* ConstructionFamily::enumerations(Nat i) const {
  auto it = sets_.find(i);
  return it == sets_.end() ? nullptr : &it->second;
}

Family ConstructionFamily::materialize(Nat index_bound, Nat universe_bound) const {
  // Exports are taken at or below the frontier, which then decides the
  // complement (evens included) without listing it.
  Family family(index_bound, universe_bound);
  const Nat decided = std::min(frontier(), universe_bound);
  for (Nat i = 0; i < index_bound; ++i) {
    StagedSet& s = family.set_mutable(i);
    if (2 * i <= universe_bound) s.put_in(2 * i);
    auto it = sets_.find(i);
    if (it != sets_.end()) {
      for (const Enumeration& e : it->second)
        if (e.value <= universe_bound) s.put_in(e.value);
    }
    s.raise_frontier(decided);
  }
  return family;
}

bool ConstructionFamily::operator==(const ConstructionFamily& other) const {
  auto strip = [](const std::map<Nat, std::vector<Enumeration>>& sets) {
    std::map<Nat, std::vector<std::pair<Nat, Nat>>> out;
    for (const auto& [i, enums] : sets) {
      if (enums.empty()) continue;
      auto& v = out[i];
      for (const Enumeration& e : enums) v.emplace_back(e.value, e.stage);
    }
    return out;
  };
  return strip(sets_) == strip(other.sets_) && frontier_history_ == other.frontier_history_;
}

}  // namespace fip
