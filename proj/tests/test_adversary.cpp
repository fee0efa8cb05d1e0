#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <sstream>

#include "fip/adversary.hpp"
#include "fip/core.hpp"
#include "fip/trace.hpp"

using namespace fip;

namespace {

StrategyList strategies_from(const std::string& body) {
  std::istringstream in("strategies v1\n" + body);
  return parse_strategies(in);
}

/// One shared medium-size run of the builtin suite (the acceptance run is
/// the long one).
const AdversaryResult& suite_run() {
  static const AdversaryResult run = [] {
    StrategyList suite = builtin_strategy_suite();
    return run_full(suite, AdversaryParams{250, 4});
  }();
  return run;
}

}  // namespace

TEST_CASE("is_bounded: length-one and witness clauses") {
  ConstructionFamily family;
  CHECK(is_bounded(std::vector<Nat>{3}, 3, family));
  CHECK_FALSE(is_bounded(std::vector<Nat>{4}, 3, family));  // entry above the stage
  CHECK_FALSE(is_bounded(std::vector<Nat>{3}, 0, family));  // length above the stage
  CHECK_THROWS_AS(is_bounded(std::vector<Nat>{}, 3, family), InputError);

  // <0,1> unbounded while A_0 and A_1 share nothing
  CHECK_FALSE(is_bounded(std::vector<Nat>{0, 1}, 5, family));
  family.put_in(0, 3, 1);
  family.put_in(1, 3, 1);
  // witness 3 placed at stage 1: usable once 3 <= s-1
  CHECK_FALSE(is_bounded(std::vector<Nat>{0, 1}, 3, family));
  CHECK(is_bounded(std::vector<Nat>{0, 1}, 4, family));
  // the self-witness clause also gates: <9,9> needs its marker 18 <= s-1
  CHECK_FALSE(is_bounded(std::vector<Nat>{9, 9}, 18, family));
  CHECK(is_bounded(std::vector<Nat>{9, 9}, 19, family));
}

TEST_CASE("warmup: a silent opponent triggers nothing") {
  StrategyList list = strategies_from("silent\n");
  auto run = run_warmup(list, AdversaryParams{40, 4});
  CHECK(run.progressive_stages[0].empty());
  CHECK(run.traps[0].empty());      // never defined: the first value never came
  CHECK(run.potentials[0].empty());
  CHECK(run.family.touched_indices().empty());
}

TEST_CASE("warmup: the greedy chase produces progressive stages") {
  StrategyList list = strategies_from("greedy delay=0\n");
  auto run = run_warmup(list, AdversaryParams{60, 4});
  CHECK(run.progressive_stages[0].size() >= 3);
  CHECK(run.respects_convention(0));
  CHECK(audit_freshness(run).empty());
  CHECK(audit_warmup_trap_disjointness(run).empty());
  CHECK(audit_totality(run).empty());
  // the trap chases but never catches: at the end some enumerated set is
  // still disjoint from it
  Nat trap = run.traps[0].back();
  bool some_disjoint = false;
  for (const ConvergenceRecord& rec : run.released[0])
    if (!run.family.pair_witness_at(rec.value, trap, ~Nat{0}, ~Nat{0})) some_disjoint = true;
  CHECK(some_disjoint);
}

TEST_CASE("warmup: interleaved opponents keep their bookkeeping apart") {
  StrategyList list = strategies_from("greedy delay=0\ngreedy delay=1\n");
  auto run = run_warmup(list, AdversaryParams{60, 4});
  CHECK(audit_freshness(run).empty());
  CHECK(audit_warmup_trap_disjointness(run).empty());
  CHECK(run.progressive_stages[0].size() >= 2);
  CHECK(run.progressive_stages[1].size() >= 1);
}

TEST_CASE("full: an empty strategy list leaves the marker skeleton") {
  StrategyList none;
  auto run = run_full(none, AdversaryParams{30, 4});
  CHECK(run.family.touched_indices().empty());
  for (Nat i = 0; i < 5; ++i) {
    CHECK(run.family.membership(i, 2 * i) == Membership::In);
    CHECK(run.family.membership(i, 2 * i + 2) == Membership::Out);
  }
}

TEST_CASE("full: a single diverging opponent still populates potential sets") {
  StrategyList list = strategies_from("silent\n");
  auto run = run_full(list, AdversaryParams{40, 4});
  CHECK(run.progressive_stages[0].empty());
  CHECK_FALSE(run.potentials[0].empty());
  CHECK_FALSE(run.traps[0].empty());
  CHECK(run.traps[0].size() == 1);  // no convergence, no redefinition
  CHECK(audit_freshness(run).empty());
  CHECK(audit_type2_discipline(run).empty());
  CHECK(audit_totality(run).empty());
}

TEST_CASE("full: builtin suite run passes every trace audit") {
  const AdversaryResult& run = suite_run();
  CHECK(audit_freshness(run).empty());
  CHECK(audit_type2_discipline(run).empty());
  CHECK(audit_trap_redefinitions(run).empty());
  CHECK(audit_totality(run).empty());
  for (Nat e = 0; e < run.strategy_names.size(); ++e)
    CHECK(audit_trap_evasion(run, e).empty());
  // the early-converging opponent reaches a progressive stage
  CHECK(run.progressive_stages[0].size() >= 1);
  // the wild script gets deferred, the tame ones never do
  CHECK_FALSE(run.respects_convention(8));
  CHECK(run.respects_convention(0));
  CHECK(run.respects_convention(3));
}

TEST_CASE("full: traps are redefined exactly at the first convergence") {
  const AdversaryResult& run = suite_run();
  for (Nat e = 0; e < run.strategy_names.size(); ++e) {
    if (run.released[e].empty()) {
      CHECK(run.traps[e].size() <= 1);
    } else if (run.traps[e].size() == 2) {
      // redefinition happened: the released record pins its stage
      CHECK(run.released[e][0].stage >= e);  // substage e exists from stage e
    }
  }
}

TEST_CASE("full: viability layers are nonempty where step 4 fired") {
  const AdversaryResult& run = suite_run();
  auto layers = viability_layers(run, 0);
  REQUIRE(layers.size() >= 2);
  CHECK_FALSE(layers[0].empty());
  CHECK_FALSE(layers[1].empty());
  for (const auto& sigma : layers[0]) CHECK(sigma.size() == 1);
  for (const auto& sigma : layers[1]) {
    CHECK(sigma.size() >= 2);
    CHECK(is_bounded(sigma, run.convergence_stage(0, 1), run.family));
  }
}

TEST_CASE("witness function: base values and chain structure") {
  const AdversaryResult& run = suite_run();
  IndexMap j = build_certified_prefix(run, 8);
  REQUIRE(j.entries.size() >= 2);
  auto wf = extract_witness_function(j, run);
  CHECK(wf.f[0] == 2 * j.entries[0]);
  CHECK(wf.chain[0] == std::vector<Nat>{j.entries[0]});
  REQUIRE(wf.chain.size() >= 2);
  for (std::size_t a = 0; a + 1 < wf.chain.size(); ++a) {
    CHECK(wf.chain[a].size() < wf.chain[a + 1].size());
    CHECK(std::equal(wf.chain[a].begin(), wf.chain[a].end(), wf.chain[a + 1].begin()));
    CHECK(wf.f[a] <= wf.f[a + 1]);
  }
  // every chain link is bounded by its f value
  for (std::size_t a = 1; a < wf.chain.size(); ++a)
    CHECK(is_bounded(wf.chain[a], wf.f[a], run.family));
}

TEST_CASE("witness function: viability audit checks links and passes") {
  const AdversaryResult& run = suite_run();
  IndexMap j = build_certified_prefix(run, 8);
  auto wf = extract_witness_function(j, run);
  Nat checked = 0;
  for (Nat e = 0; e < run.strategy_names.size(); ++e) {
    auto audit = audit_viability(wf, run, e);
    checked += audit.checked;
    CHECK(audit.violations.empty());
  }
  CHECK(checked >= 3);
}

TEST_CASE("witness function: a too-short prefix is flagged partial") {
  const AdversaryResult& run = suite_run();
  IndexMap j;
  j.entries = {0};
  auto wf = extract_witness_function(j, run);
  CHECK(wf.partial);
  CHECK(wf.f == std::vector<Nat>{0});

  IndexMap bad;
  bad.entries = {0, 1};  // ambient markers never intersect
  CHECK_THROWS_AS(extract_witness_function(bad, run), InputError);
}

TEST_CASE("full runs are deterministic") {
  StrategyList a = builtin_strategy_suite();
  StrategyList b = builtin_strategy_suite();
  auto run_a = run_full(a, AdversaryParams{120, 4});
  auto run_b = run_full(b, AdversaryParams{120, 4});
  CHECK(run_a.trace.serialize() == run_b.trace.serialize());
  CHECK(run_a.family == run_b.family);
}

TEST_CASE("trace files round trip") {
  StrategyList list = strategies_from("greedy delay=0\n");
  auto run = run_warmup(list, AdversaryParams{40, 4});
  std::string text = run.trace.serialize();
  std::istringstream in(text);
  Trace parsed = Trace::parse(in);
  CHECK(parsed.complete());
  CHECK(parsed.serialize() == text);

  // a truncated trace parses but is not complete
  std::istringstream cut(text.substr(0, text.size() / 2));
  Trace partial = Trace::parse(cut);
  CHECK_FALSE(partial.complete());
}

TEST_CASE("strategy parsing and the revelation contract") {
  CHECK_THROWS_AS(strategies_from("warp speed\n"), InputError);
  CHECK_THROWS_AS(strategies_from("script 0=1\n"), InputError);
  {
    std::istringstream in("strategies v0\nsilent\n");
    CHECK_THROWS_AS(parse_strategies(in), InputError);
  }

  // emitting the same argument twice violates monotone revelation
  StrategyList twice = strategies_from("script 0=0@1 0=0@2\n");
  AdversaryParams params{10, 4};
  CHECK_THROWS_AS(run_full(twice, params), InputError);
}

TEST_CASE("builtin suite parses to ten opponents") {
  StrategyList suite = builtin_strategy_suite();
  CHECK(suite.size() == 10);
  std::istringstream in(builtin_strategy_suite_text());
  CHECK(parse_strategies(in).size() == 10);
}

TEST_CASE("boundedness re-evaluates from history at sampled points") {
  const AdversaryResult& run = suite_run();
  REQUIRE(run.bounded_strings.size() >= 20);
  // sample across the registry: each string first bounded exactly where
  // the runner said, and not one stage earlier
  std::size_t step = run.bounded_strings.size() / 20;
  for (std::size_t k = 0; k < run.bounded_strings.size(); k += step) {
    const auto& sigma = run.bounded_strings[k];
    Nat first = run.first_bounded[k];
    CHECK(is_bounded(sigma, first, run.family));
    if (first > 1) CHECK_FALSE(is_bounded(sigma, first - 1, run.family));
  }
}
