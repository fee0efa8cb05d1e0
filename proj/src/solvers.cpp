#include "fip/solvers.hpp"

#include <algorithm>
#include <map>

namespace fip {

Nat cantor_pair(Nat i, Nat n) {
  Nat s = i + n;
  if (s > 0xFFFFFFFFULL) throw InputError("cantor_pair argument overflow");
  return s * (s + 1) / 2 + n;
}

std::pair<Nat, Nat> cantor_unpair(Nat code) {
  Nat w = 0;
  while ((w + 1) * (w + 2) / 2 <= code) ++w;
  Nat t = w * (w + 1) / 2;
  Nat n = code - t;
  return {w - n, n};
}

bool is_valid_condition(const Family& family, const ForcingCondition& condition) {
  if (condition.entries.empty()) throw InputError("empty string is not a condition");
  auto part = condition.index_part();
  if (part.empty()) return true;
  for (Nat i : part)
    if (i >= family.index_bound()) return false;
  for (Nat x = 0; x <= condition.bound() && x <= family.universe_bound(); ++x) {
    bool common = true;
    for (Nat i : part) {
      if (family.membership(i, x) != Membership::In) {
        common = false;
        break;
      }
    }
    if (common) return true;
  }
  return false;
}

GreedySolveResult solve_greedy(
    const Family& family, std::span<const Nat> requirements, Nat budget,
    const std::function<void(const Family&, ForcingCondition&)>& jump_hook) {
  auto seed = family.nontrivial_witness();
  if (!seed) seed = family.find_nontrivial_witness();
  if (!seed) throw InputError("solve_greedy requires a nontrivial family");

  GreedySolveResult result;
  ForcingCondition cur{{seed->first, seed->second}};
  if (!is_valid_condition(family, cur))
    throw InputError("nontrivial witness does not seed a valid condition");
  result.chain.push_back(cur);
  result.certs.push_back(WitnessCertificate{{seed->first}, seed->second});

  Nat settled = 0;
  for (std::size_t k = 0; k < requirements.size(); ++k) {
    if (settled == budget) {
      result.budget_exhausted = true;
      result.unsettled.assign(requirements.begin() + k, requirements.end());
      break;
    }
    Nat e = requirements[k];
    if (e >= family.index_bound()) throw InputError("requirement index out of bounds");
    if (jump_hook) jump_hook(family, cur);
    ++settled;

    auto part = cur.index_part();
    if (std::find(part.begin(), part.end(), e) != part.end()) continue;

    std::vector<Nat> joined(part.begin(), part.end());
    joined.push_back(e);
    auto witness = least_common_element(family, joined);
    if (!witness) {
      result.unreachable.push_back(e);
      continue;
    }
    // the least extension covering e: append e, then the least bound
    std::vector<Nat> entries(part.begin(), part.end());
    entries.push_back(e);
    entries.push_back(*witness);
    cur.entries = std::move(entries);

    std::sort(joined.begin(), joined.end());
    joined.erase(std::unique(joined.begin(), joined.end()), joined.end());
    result.chain.push_back(cur);
    result.certs.push_back(WitnessCertificate{joined, *witness});
  }

  auto part = cur.index_part();
  result.j.entries.assign(part.begin(), part.end());
  return result;
}

Nat compute_g(const Family& family, Nat s) {
  const Nat top = std::min(s, family.index_bound() == 0 ? Nat{0} : family.index_bound() - 1);
  if (family.index_bound() == 0) return 0;
  if (top > 20) throw InputError("compute_g guard exceeded: 2^" + std::to_string(top + 1) +
                                 " index sets");
  Nat g = 0;
  std::vector<Nat> subset;
  auto rec = [&](auto&& self, Nat next) -> void {
    if (!subset.empty()) {
      auto witness = least_common_element(family, subset);
      if (witness && *witness > g) g = *witness;
    }
    for (Nat i = next; i <= top; ++i) {
      subset.push_back(i);
      self(self, i + 1);
      subset.pop_back();
    }
  };
  rec(rec, 0);
  return g;
}

HyperimmuneSolveResult solve_hyperimmune(const Family& family, const DominationOracle& oracle,
                                         Nat steps) {
  if (family.index_bound() == 0 || family.set(0).empty_decided())
    throw InputError("solve_hyperimmune requires A_0 nonempty");

  HyperimmuneSolveResult result;
  result.j.entries.push_back(0);
  {
    auto w = least_common_element(family, std::vector<Nat>{0});
    result.prefix_certs.push_back(WitnessCertificate{{0}, *w});
  }

  for (Nat s = 0; s < steps; ++s) {
    std::vector<Nat> chosen = result.j.range();
    std::optional<Nat> pick;
    std::optional<Nat> pick_witness;
    for (Nat i = 0; i <= s && i < family.index_bound(); ++i) {
      if (std::binary_search(chosen.begin(), chosen.end(), i)) continue;
      std::vector<Nat> joined = chosen;
      joined.push_back(i);
      std::sort(joined.begin(), joined.end());
      auto witness = least_common_element(family, joined);
      if (witness && *witness <= oracle.at(s)) {
        pick = i;
        pick_witness = witness;
        break;
      }
    }
    if (pick) {
      result.j.entries.push_back(*pick);
      std::vector<Nat> joined = result.j.range();
      result.prefix_certs.push_back(WitnessCertificate{joined, *pick_witness});
    } else {
      result.j.entries.push_back(0);
      result.prefix_certs.push_back(result.prefix_certs.back());
    }
  }

  std::vector<Nat> chosen = result.j.range();
  result.maximality = is_maximal(family, chosen, IntersectionProperty::f());
  return result;
}

namespace {

WitnessCertificate certificate_for_copies(const Family& family, const std::vector<Nat>& m) {
  std::vector<Nat> indices;
  for (Nat code : m) indices.push_back(cantor_unpair(code).first);
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  auto witness = least_common_element(family, indices);
  if (!witness)
    throw ContractViolation("permitting: copies in M lost their common witness");
  return WitnessCertificate{indices, *witness};
}

}  // namespace

PermittingSolveResult solve_permitting(const Family& family, const CeEnumeration& ce,
                                       Nat stages) {
  ce.validate();
  if (family.index_bound() == 0 || family.set(0).empty_decided())
    throw InputError("solve_permitting requires A_0 nonempty");
  if (ce.stages() <= stages)
    throw InputError("c.e. enumeration provides " + std::to_string(ce.stages()) +
                     " stages; need snapshots through stage " + std::to_string(stages));

  PermittingSolveResult result;
  PermittingState& st = result.state;

  st.m = {cantor_pair(0, 0)};
  {
    TraceEvent ev;
    ev.stage = 0;
    ev.kind = "permit";
    ev.with("code", cantor_pair(0, 0)).with("i", Nat{0}).with("n", Nat{0});
    st.trace.emit(std::move(ev));
  }
  st.m_history.push_back(st.m);
  st.stage_certs.push_back(certificate_for_copies(family, st.m));

  for (Nat s = 0; s + 1 <= stages; ++s) {
    const Nat next_stage = s + 1;
    const Nat least_new = ce.least_new(next_stage);

    std::map<Nat, Nat> copy_of;  // i -> code
    for (Nat code : st.m) {
      auto [i, n] = cantor_unpair(code);
      copy_of[i] = code;
    }

    // l(i, s) for copyless i: the greatest copied k such that one number
    // <= s lies in A_i and every copied A_j with j <= k.
    auto ell = [&](Nat i) -> std::optional<Nat> {
      std::vector<Nat> copied;
      for (const auto& [j, code] : copy_of) copied.push_back(j);
      for (auto it = copied.rbegin(); it != copied.rend(); ++it) {
        Nat k = *it;
        std::vector<Nat> indices{i};
        for (Nat j : copied)
          if (j <= k) indices.push_back(j);
        std::sort(indices.begin(), indices.end());
        auto witness = least_common_element(family, indices);
        if (witness && *witness <= s) return k;
      }
      return std::nullopt;
    };

    std::optional<Nat> selected;
    std::optional<Nat> selected_ell;
    for (Nat i = 0; i <= s && i < family.index_bound(); ++i) {
      if (copy_of.count(i)) continue;
      auto l = ell(i);
      if (!l) continue;
      bool blocked = false;
      for (const auto& [j, code] : copy_of)
        if (*l < j && j < i) blocked = true;
      if (blocked) continue;
      bool permitted = true;
      for (const auto& [j, code] : copy_of)
        if (j > *l && least_new > code) permitted = false;
      if (!permitted) continue;
      selected = i;
      selected_ell = l;
      break;
    }

    if (!selected) {
      TraceEvent ev;
      ev.stage = next_stage;
      ev.kind = "stay";
      st.trace.emit(std::move(ev));
    } else {
      const Nat max_old = st.m.back();
      std::vector<Nat> kept;
      for (Nat code : st.m) {
        auto [j, n] = cantor_unpair(code);
        if (j > *selected_ell) {
          TraceEvent ev;
          ev.stage = next_stage;
          ev.kind = "remove";
          ev.with("code", code).with("i", j).with("n", n);
          st.trace.emit(std::move(ev));
        } else {
          kept.push_back(code);
        }
      }
      Nat n = 0;
      while (cantor_pair(*selected, n) < least_new || cantor_pair(*selected, n) <= max_old) ++n;
      Nat code = cantor_pair(*selected, n);
      kept.push_back(code);
      std::sort(kept.begin(), kept.end());
      st.m = std::move(kept);
      TraceEvent ev;
      ev.stage = next_stage;
      ev.kind = "permit";
      ev.with("code", code).with("i", *selected).with("n", n).with("least_new", least_new);
      st.trace.emit(std::move(ev));
    }
    st.m_history.push_back(st.m);
    st.stage_certs.push_back(certificate_for_copies(family, st.m));
  }
  st.trace.mark_complete();

  std::vector<Nat> indices;
  for (Nat code : st.m) indices.push_back(cantor_unpair(code).first);
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  result.j.entries = std::move(indices);
  return result;
}

std::vector<std::string> audit_permitting(const PermittingSolveResult& result,
                                          const CeEnumeration& ce) {
  std::vector<std::string> violations;
  const auto& history = result.state.m_history;
  const Nat zero_code = cantor_pair(0, 0);
  for (Nat s = 0; s < history.size(); ++s) {
    const auto& m = history[s];
    if (!std::binary_search(m.begin(), m.end(), zero_code))
      violations.push_back("stage " + std::to_string(s) + ": <0,0> missing from M");
    std::vector<Nat> firsts;
    for (Nat code : m) firsts.push_back(cantor_unpair(code).first);
    std::sort(firsts.begin(), firsts.end());
    if (std::adjacent_find(firsts.begin(), firsts.end()) != firsts.end())
      violations.push_back("stage " + std::to_string(s) + ": an index holds two copies");
  }
  for (Nat s = 0; s + 1 < history.size(); ++s) {
    const auto& before = history[s];
    const auto& after = history[s + 1];
    std::vector<Nat> changed;
    std::set_symmetric_difference(before.begin(), before.end(), after.begin(), after.end(),
                                  std::back_inserter(changed));
    if (changed.empty()) continue;
    Nat least_new = ce.least_new(s + 1);
    for (Nat code : changed) {
      if (least_new > code)
        violations.push_back("stage " + std::to_string(s + 1) + ": M changed at " +
                             std::to_string(code) +
                             " without an enumeration change below it");
    }
  }
  return violations;
}

}  // namespace fip
