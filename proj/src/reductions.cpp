#include "fip/reductions.hpp"

#include <algorithm>
#include <map>

namespace fip {

namespace {

/// All subsets of {0..top} with size in [min_size, max_size], ordered by
/// size then lexicographically.
std::vector<std::vector<Nat>> subsets_by_size(Nat top, Nat min_size, Nat max_size) {
  std::vector<std::vector<Nat>> out;
  std::vector<Nat> cur;
  auto rec = [&](auto&& self, Nat next, Nat size) -> void {
    if (cur.size() == size) {
      out.push_back(cur);
      return;
    }
    for (Nat i = next; i <= top; ++i) {
      cur.push_back(i);
      self(self, i + 1, size);
      cur.pop_back();
    }
  };
  for (Nat size = min_size; size <= max_size && size <= top + 1; ++size) rec(rec, 0, size);
  return out;
}

HatTransform run_hat(const Family& a, Nat n, Nat stages, bool exactly_n_plus_1) {
  if (n < 2) throw InputError("hat transform requires n >= 2");
  if (!a.nontrivial()) throw InputError("hat transform requires a nontrivial family");
  if (auto undecided = a.first_undecided())
    throw TruncationError("hat transform needs a fully decided source (set " +
                          std::to_string(undecided->first) + ", element " +
                          std::to_string(undecided->second) + " undecided)");

  const Nat index_bound = a.index_bound();
  HatTransform result;
  result.n = n;
  result.stages_run = stages;

  // Memoized least witness per n-subset of the source.
  std::map<std::vector<Nat>, std::optional<Nat>> witness;
  auto witness_of = [&](const std::vector<Nat>& g) -> std::optional<Nat> {
    auto it = witness.find(g);
    if (it == witness.end()) it = witness.emplace(g, least_common_element(a, g)).first;
    return it->second;
  };
  auto qualifies_by = [&](const std::vector<Nat>& f, Nat s) {
    std::vector<std::size_t> pick(n);
    for (std::size_t i = 0; i < n; ++i) pick[i] = i;
    std::vector<Nat> g(n);
    while (true) {
      for (std::size_t i = 0; i < n; ++i) g[i] = f[pick[i]];
      auto w = witness_of(g);
      if (!w || *w > s) return false;
      std::size_t i = n;
      bool advanced = false;
      while (i > 0) {
        --i;
        if (pick[i] != i + f.size() - n) {
          ++pick[i];
          for (std::size_t j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
          advanced = true;
          break;
        }
      }
      if (!advanced) return true;
    }
  };

  // in_sets[i] collects the odd elements assigned to target set i.
  std::vector<std::vector<Nat>> in_sets(index_bound);
  Nat next_odd = 1;

  for (Nat s = 0; s < stages; ++s) {
    const Nat top = std::min(s, index_bound == 0 ? Nat{0} : index_bound - 1);
    const Nat min_size = exactly_n_plus_1 ? n + 1 : n;
    const Nat max_size = exactly_n_plus_1 ? n + 1 : top + 1;
    bool any = false;
    for (const auto& f : subsets_by_size(top, min_size, max_size)) {
      if (!qualifies_by(f, s)) continue;
      any = true;
      for (Nat i : f) in_sets[i].push_back(next_odd);
      next_odd += 2;
    }
    if (!any) next_odd += 2;  // odd decided out of every target set
  }

  // Materialize the target: markers plus assigned odds, everything else
  // decided out up to the universe bound.
  const Nat max_marker = index_bound == 0 ? 0 : 2 * (index_bound - 1);
  const Nat universe = std::max(max_marker, next_odd >= 3 ? next_odd - 2 : Nat{0});
  Family target(index_bound, universe);
  for (Nat i = 0; i < index_bound; ++i) {
    StagedSet& t = target.set_mutable(i);
    t.put_in(2 * i);
    for (Nat odd : in_sets[i]) t.put_in(odd);
    t.raise_frontier(universe);
  }
  if (auto w = a.nontrivial_witness())
    target.set_nontrivial_witness(w->first, 2 * w->first);
  result.next_odd = next_odd;

  // Report index sets the budget left unwitnessed: their n-subsets are all
  // witnessed in the source, yet no common element was assigned.
  const Nat top = index_bound == 0 ? 0 : index_bound - 1;
  const Nat min_size = exactly_n_plus_1 ? n + 1 : n;
  const Nat max_size = exactly_n_plus_1 ? n + 1 : index_bound;
  for (const auto& f : subsets_by_size(top, min_size, max_size)) {
    if (!qualifies_by(f, a.universe_bound())) continue;
    if (!least_common_element(target, f)) result.unwitnessed.push_back(f);
  }

  result.target = std::move(target);
  return result;
}

bool is_marker_singleton(const Family& family, Nat i) {
  Nat decided_in = 0;
  for (Nat n = 0; n <= family.universe_bound(); ++n)
    if (family.membership(i, n) == Membership::In) ++decided_in;
  return decided_in <= 1;
}

}  // namespace

HatTransform hat_transform(const Family& a, Nat n, Nat stages) {
  return run_hat(a, n, stages, false);
}

HatTransform hat_transform_bounded(const Family& a, Nat n, Nat stages) {
  return run_hat(a, n, stages, true);
}

std::vector<Nat> pull_back_solution(const Family& a, const Family& hat,
                                    std::span<const Nat> hat_chosen, Nat n) {
  auto hat_verdict = is_maximal(hat, hat_chosen, IntersectionProperty::f());
  if (hat_verdict.outcome != MaximalityVerdict::Outcome::Maximal)
    throw InputError("pull_back_solution: chosen set is not a maximal full-intersection "
                     "solution of the derived family");

  std::vector<Nat> result(hat_chosen.begin(), hat_chosen.end());
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());

  const IntersectionProperty prop = IntersectionProperty::dbar(n);
  if (!check_property_on(a, result, prop).holds())
    throw ContractViolation("pull_back_solution: result fails Dbar" + std::to_string(n) +
                            " on the source");
  auto verdict = is_maximal(a, result, prop);
  if (verdict.outcome != MaximalityVerdict::Outcome::Maximal)
    throw ContractViolation("pull_back_solution: result is not maximal on the source "
                            "truncation");
  return result;
}

Family encode_range(const FunctionTable& table, Nat index_bound, Nat universe_bound) {
  if (table.values.empty()) throw InputError("encode_range needs a nonempty table");
  const Nat domain = table.domain_size();
  const Nat max_value = *std::max_element(table.values.begin(), table.values.end());
  if (index_bound == 0) index_bound = max_value + 1;
  if (index_bound <= max_value)
    throw InputError("encode_range: index bound must exceed every table value");
  if (universe_bound == 0) universe_bound = 2 * std::max(domain, index_bound) + 1;

  Family family(index_bound, universe_bound);
  for (Nat i = 0; i < index_bound; ++i) {
    StagedSet& s = family.set_mutable(i);
    if (2 * i <= universe_bound) s.put_in(2 * i);
    for (Nat odd = 1; odd <= universe_bound; odd += 2) {
      const Nat a = (odd - 1) / 2;
      bool in = false;
      for (Nat b = 0; b <= a && b < domain; ++b) {
        if (table.values[b] == i) {
          in = true;
          break;
        }
      }
      if (in) s.put_in(odd);
    }
    s.raise_frontier(universe_bound);
  }
  family.set_nontrivial_witness(0, 0);
  return family;
}

RangeDecode decode_range(const Family& family, std::span<const Nat> chosen,
                         const IntersectionProperty& prop) {
  auto verdict = is_maximal(family, chosen, prop);
  if (verdict.outcome != MaximalityVerdict::Outcome::Maximal)
    throw InputError("decode_range: chosen set is not a maximal " + prop.name() + " solution");

  auto in_chosen = [&](Nat i) {
    for (Nat j : chosen)
      if (!distinct(family, i, j)) return true;
    return false;
  };

  RangeDecode decode;
  if (prop.kind == IntersectionProperty::Kind::EmptyN) {
    for (Nat i = 0; i < family.index_bound(); ++i) {
      if (!in_chosen(i))
        decode.decoded.push_back(i);
      else if (!is_marker_singleton(family, i))
        decode.exceptions.push_back(i);
    }
    if (decode.exceptions.size() >= prop.n)
      throw ContractViolation("decode_range: more than n-1 non-singleton sets in a D_n "
                              "solution");
  } else {
    bool any_nonsingleton = false;
    for (Nat j : chosen)
      if (!is_marker_singleton(family, j)) any_nonsingleton = true;
    if (!any_nonsingleton)
      throw InputError("decode_range: degenerate solution of marker singletons only; "
                       "the range is not recoverable from it");
    for (Nat i = 0; i < family.index_bound(); ++i)
      if (in_chosen(i)) decode.decoded.push_back(i);
  }
  return decode;
}

}  // namespace fip
