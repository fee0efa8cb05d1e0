// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its case counts, bounds and tolerances in
// code; every check runs against an independent oracle (exhaustive
// enumeration, the transform-law checker, or trace audits).

#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "fip/adversary.hpp"
#include "fip/core.hpp"
#include "fip/family_io.hpp"
#include "fip/genericity.hpp"
#include "fip/oracle.hpp"
#include "fip/reductions.hpp"
#include "fip/scenario.hpp"
#include "fip/solvers.hpp"
#include "test_support.hpp"

using namespace fip;
using fip::testing::Rng;

namespace {

int failures_total = 0;

struct Criterion {
  const char* label;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  void finish(Nat failures, const std::string& detail) {
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::printf("[%s] %s: %s (%llu failures, %.1f s)\n", failures == 0 ? "PASS" : "FAIL", label,
                detail.c_str(), static_cast<unsigned long long>(failures), seconds);
    std::fflush(stdout);
    if (failures) ++failures_total;
  }
};

/// Shared generator for the metamorphic suites: marker-convention families
/// mixing random densities with common-element and disjoint shapes.
Family generated_family(Rng& rng, Nat max_index_bound, Nat max_universe) {
  Nat index_bound = 1 + rng.below(max_index_bound);
  Nat universe = 8 + rng.below(max_universe - 7);
  Nat shape = rng.below(10);
  if (shape == 0) return make_marker_family(index_bound, universe);
  if (shape == 1) return make_common_element_family(index_bound, universe, 1 + 2 * rng.below(4));
  return fip::testing::random_family(rng, index_bound, universe, true, 200 + rng.below(500));
}

Nat adequate_stages(const Family& family) {
  return std::max(family.universe_bound(), family.index_bound()) + 2;
}

void criterion_1_transform_law() {
  Criterion c{"criterion 1: transform-law metamorphic suite"};
  Rng rng(0xACC1);
  Nat failures = 0;
  Nat cases = 0;
  for (; cases < 500; ++cases) {
    Family family = generated_family(rng, 5, 30);
    for (Nat n : {Nat{2}, Nat{3}}) {
      auto hat = hat_transform(family, n, adequate_stages(family));
      if (!check_hat_law(family, hat.target, n, false).empty()) ++failures;
    }
  }
  c.finish(failures, "500 families, n in {2,3}, exact against the brute-force checker");
}

void criterion_2_pullback() {
  Criterion c{"criterion 2: reduction pull-back"};
  Rng rng(0xACC2);
  Nat failures = 0;
  const Nat n = 2;
  for (Nat cases = 0; cases < 200; ++cases) {
    Family family = generated_family(rng, 5, 26);
    auto hat = hat_transform(family, n, adequate_stages(family));
    auto catalogue = brute_force_maximal(family, IntersectionProperty::dbar(n));
    for (const auto& solution : brute_force_maximal(hat.target, IntersectionProperty::f())) {
      std::vector<Nat> pulled;
      try {
        pulled = pull_back_solution(family, hat.target, solution, n);
      } catch (const std::exception&) {
        ++failures;
        continue;
      }
      bool in_catalogue = false;
      for (const auto& entry : catalogue)
        if (entry == pulled) in_catalogue = true;
      if (!in_catalogue) ++failures;
    }
  }
  c.finish(failures, "200 families, every derived solution pulled back into the "
                     "brute-force catalogue");
}

void criterion_3_range_roundtrip() {
  Criterion c{"criterion 3: range round-trip"};
  Rng rng(0xACC3);
  Nat failures = 0;
  for (Nat cases = 0; cases < 300; ++cases) {
    FunctionTable table;
    Nat domain = 1 + rng.below(6);
    for (Nat b = 0; b < domain; ++b) table.values.push_back(rng.below(7));
    Family family = encode_range(table, 7);
    std::vector<Nat> range = table.range();

    for (const auto& prop : {IntersectionProperty::f(), IntersectionProperty::dbar(2)}) {
      for (const auto& solution : brute_force_maximal(family, prop)) {
        bool lone_singleton = true;
        for (Nat j : solution)
          if (family.set(j).decided_in().size() > 1) lone_singleton = false;
        if (lone_singleton) {
          // documented degenerate shape: one marker singleton off the range
          bool expected_shape =
              solution.size() == 1 &&
              std::find(range.begin(), range.end(), solution[0]) == range.end();
          if (!expected_shape) ++failures;
          continue;
        }
        if (decode_range(family, solution, prop).decoded != range) ++failures;
      }
    }
    for (Nat dn : {Nat{2}, Nat{3}}) {
      auto prop = IntersectionProperty::d(dn);
      for (const auto& solution : brute_force_maximal(family, prop)) {
        auto decode = decode_range(family, solution, prop);
        if (decode.exceptions.size() > dn - 1) ++failures;
        std::vector<Nat> reunion = decode.decoded;
        reunion.insert(reunion.end(), decode.exceptions.begin(), decode.exceptions.end());
        std::sort(reunion.begin(), reunion.end());
        if (reunion != range) ++failures;
      }
    }
  }
  c.finish(failures, "300 tables, F and Dbar2 exact, D2/D3 up to n-1 reported exceptions");
}

void criterion_4_domination_escape() {
  Criterion c{"criterion 4: domination escape"};
  Rng rng(0xACC4);
  Nat failures = 0;
  for (Nat cases = 0; cases < 100; ++cases) {
    Family generated = generated_family(rng, 5, 26);
    if (generated.index_bound() < 2) continue;
    // rebuild with a shared odd element in A_0 and A_1 so an extension
    // beyond A_0 always exists and the zero oracle's stall is visibly
    // non-maximal
    Family family(generated.index_bound(), generated.universe_bound());
    for (Nat i = 0; i < generated.index_bound(); ++i) {
      for (Nat x : generated.set(i).decided_in()) family.set_mutable(i).put_in(x);
      if (i < 2) family.set_mutable(i).put_in(1);
      family.set_mutable(i).raise_frontier(generated.universe_bound());
    }

    Nat steps = 2 * family.index_bound() + 2;
    DominationOracle escape;
    for (Nat t = 0; t < steps; ++t) escape.values.push_back(compute_g(family, t) + 1);
    auto escaped = solve_hyperimmune(family, escape, steps);
    if (escaped.maximality.outcome != MaximalityVerdict::Outcome::Maximal) ++failures;

    DominationOracle zero;
    zero.values.assign(steps, 0);
    auto stalled = solve_hyperimmune(family, zero, steps);
    if (stalled.j.range() != std::vector<Nat>{0}) ++failures;
    if (stalled.maximality.outcome != MaximalityVerdict::Outcome::Extendable) ++failures;
  }
  c.finish(failures, "100 families: g+1 always maximal, zero oracle stalls at J = 0");
}

void criterion_5_permitting() {
  Criterion c{"criterion 5: permitting audit"};
  Rng rng(0xACC5);
  Nat failures = 0;
  for (Nat cases = 0; cases < 100; ++cases) {
    bool ascending = cases % 2 == 0;
    Family family =
        ascending ? [&] {
          // common element plus random extra odds, decided up front
          Family f(2 + rng.below(4), 25);
          for (Nat i = 0; i < f.index_bound(); ++i) {
            f.set_mutable(i).put_in(2 * i);
            f.set_mutable(i).put_in(1);
            for (Nat odd = 3; odd <= 25; odd += 2)
              if (rng.chance_permille(300)) f.set_mutable(i).put_in(odd);
            f.set_mutable(i).raise_frontier(25);
          }
          return f;
        }()
                  : generated_family(rng, 5, 25);
    Nat stages = 2 * family.universe_bound() + 2 * family.index_bound();
    CeEnumeration ce;
    ce.added.resize(stages + 1);
    if (ascending) {
      for (Nat t = 0; t <= stages; ++t) ce.added[t] = {t};
    } else {
      Nat next = rng.below(3);
      for (Nat t = 0; t <= stages; ++t) {
        Nat count = 1 + rng.below(3);
        for (Nat k = 0; k < count; ++k) {
          ce.added[t].push_back(next);
          next += 1 + rng.below(4);
        }
      }
    }
    auto result = solve_permitting(family, ce, stages);
    if (!audit_permitting(result, ce).empty()) ++failures;
    if (result.state.stage_certs.size() != result.state.m_history.size()) ++failures;
    if (ascending) {
      auto verdict = is_maximal(family, result.j.range(), IntersectionProperty::f());
      if (verdict.outcome != MaximalityVerdict::Outcome::Maximal) ++failures;
    }
  }
  c.finish(failures, "100 runs audited; one-fresh-element runs reach maximality");
}

void criterion_6_adversary() {
  Criterion c{"criterion 6: adversary trace invariants"};
  Nat failures = 0;
  std::ostringstream detail;
  StrategyList suite = builtin_strategy_suite();
  auto run = run_full(suite, AdversaryParams{2000, 4});

  Nat violations = 0;
  violations += audit_freshness(run).size();
  violations += audit_type2_discipline(run).size();
  violations += audit_trap_redefinitions(run).size();
  violations += audit_totality(run).size();
  for (Nat e = 0; e < suite.size(); ++e) violations += audit_trap_evasion(run, e).size();
  if (violations) ++failures;

  // The conditional clause: every convention-respecting opponent with at
  // least three progressive stages must yield a fully viable chain. At
  // this truncation depth the quantifier is empty (progressive depth is
  // capped at one; see the run analysis below), so the stronger reachable
  // facts are asserted instead of letting the pass go hollow.
  IndexMap j = build_certified_prefix(run, 8);
  WitnessFunction wf = extract_witness_function(j, run);
  Nat checked_links = 0;
  Nat progressive_total = 0;
  for (Nat e = 0; e < suite.size(); ++e) {
    progressive_total += run.progressive_stages[e].size();
    if (run.respects_convention(e) && run.progressive_stages[e].size() >= 3) {
      auto audit = audit_viability(wf, run, e);
      if (!audit.violations.empty() || audit.checked == 0) ++failures;
    }
    auto audit = audit_viability(wf, run, e);
    checked_links += audit.checked;
    if (!audit.violations.empty()) ++failures;
  }
  if (progressive_total == 0) ++failures;
  if (wf.chain.size() < 3) ++failures;
  if (checked_links < 3) ++failures;
  detail << "S=2000, 10 opponents, " << violations << " trace violations, "
         << progressive_total << " progressive stages, chain of " << wf.chain.size()
         << " links, " << checked_links << " viability links audited";
  c.finish(failures, detail.str());
}

void criterion_7_genericity() {
  Criterion c{"criterion 7: genericity round-trip"};
  Rng rng(0xACC7);
  Nat failures = 0;
  Nat cases = 0;
  while (cases < 100) {
    Family family = generated_family(rng, 6, 25);
    Coding coding = Coding::for_family(family);
    std::vector<DenseSetQuery> targets;
    for (Nat i = 0; i < family.index_bound(); ++i)
      targets.push_back({i, family.universe_bound()});
    ++cases;
    try {
      auto built = build_generic(family, coding, targets);
      auto extraction = extract_subfamily(built.g, family, coding);
      if (extraction.maximality.outcome != MaximalityVerdict::Outcome::Maximal) ++failures;
    } catch (const std::exception&) {
      ++failures;
    }
  }

  Nat monotonicity_failures = 0;
  for (Nat trial = 0; trial < 1000; ++trial) {
    Family family = fip::testing::random_family(rng, 1 + rng.below(5), 6 + rng.below(20), true,
                                                300 + rng.below(500));
    Coding coding = Coding::for_family(family);
    Nat span = 40 + rng.below(400);
    BitString longer;
    longer.length = span;
    Nat pos = rng.below(25);
    while (pos < span) {
      longer.ones.push_back(pos);
      pos += 1 + rng.below(40);
    }
    BitString shorter = longer.prefix(rng.below(span));
    auto a = acceptable_sequence(shorter, family, coding);
    auto b = acceptable_sequence(longer, family, coding);
    if (a.entries.size() > b.entries.size()) {
      ++monotonicity_failures;
      continue;
    }
    for (std::size_t k = 0; k < a.entries.size(); ++k)
      if (a.entries[k].position != b.entries[k].position) ++monotonicity_failures;
  }
  if (monotonicity_failures) ++failures;
  c.finish(failures, "100 extracted subfamilies maximal at full budget; 1000 "
                     "prefix-monotonicity pairs");
}

void criterion_8_determinism() {
  Criterion c{"criterion 8: determinism"};
  Nat failures = 0;
  for (const std::string& name : builtin_scenario_names()) {
    auto first = run_scenario(builtin_scenario(name));
    auto second = run_scenario(builtin_scenario(name));
    if (!first.pass || !second.pass) ++failures;
    if (first.output_text != second.output_text || first.trace_text != second.trace_text ||
        first.detail != second.detail)
      ++failures;
    if (!first.trace_text.empty()) {
      std::istringstream in(first.trace_text);
      auto replayed = replay(Trace::parse(in));
      if (!replayed.complete) ++failures;
    }
  }
  // trace replay equals the original construction, bit for bit
  StrategyList suite = builtin_strategy_suite();
  auto run = run_full(suite, AdversaryParams{150, 4});
  std::istringstream in(run.trace.serialize());
  auto replayed = replay(Trace::parse(in));
  if (!replayed.family || !(*replayed.family == run.family)) ++failures;
  c.finish(failures, "all golden scenarios byte-identical across two runs, replay exact");
}

}  // namespace

int main() {
  criterion_1_transform_law();
  criterion_2_pullback();
  criterion_3_range_roundtrip();
  criterion_4_domination_escape();
  criterion_5_permitting();
  criterion_6_adversary();
  criterion_7_genericity();
  criterion_8_determinism();
  if (failures_total) {
    std::printf("%d criteria FAILED\n", failures_total);
    return 1;
  }
  std::printf("all 8 criteria passed\n");
  return 0;
}
