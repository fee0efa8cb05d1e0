#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "fip/core.hpp"
#include "fip/family_io.hpp"
#include "fip/oracle.hpp"
#include "fip/solvers.hpp"
#include "test_support.hpp"

using namespace fip;
using fip::testing::family_of;
using fip::testing::Rng;

namespace {

CeEnumeration ascending_ce(Nat stages) {
  CeEnumeration ce;
  ce.added.resize(stages);
  for (Nat s = 0; s < stages; ++s) ce.added[s] = {s};
  return ce;
}

}  // namespace

TEST_CASE("cantor pairing is a bijection, monotone in each argument") {
  for (Nat code = 0; code < 500; ++code) {
    auto [i, n] = cantor_unpair(code);
    CHECK(cantor_pair(i, n) == code);
  }
  for (Nat i = 0; i < 15; ++i) {
    for (Nat n = 0; n < 15; ++n) {
      CHECK(cantor_pair(i + 1, n) > cantor_pair(i, n));
      CHECK(cantor_pair(i, n + 1) > cantor_pair(i, n));
    }
  }
}

TEST_CASE("forcing conditions: last entry bounds a common witness") {
  Family family = family_of({{0, 1}, {2, 1}, {4, 3}}, 10);
  CHECK(is_valid_condition(family, ForcingCondition{{0, 1, 1}}));   // witness 1 <= 1
  CHECK_FALSE(is_valid_condition(family, ForcingCondition{{0, 1, 0}}));  // witness above bound
  CHECK_FALSE(is_valid_condition(family, ForcingCondition{{0, 2, 9}}));  // empty intersection
  CHECK(is_valid_condition(family, ForcingCondition{{5}}));  // length one is vacuous
  CHECK_THROWS_AS(is_valid_condition(family, ForcingCondition{{}}), InputError);
}

TEST_CASE("solve_greedy: global common element reaches every requirement") {
  Family family = make_common_element_family(4, 20, 1);
  family.set_nontrivial_witness(0, 1);
  std::vector<Nat> requirements{0, 1, 2, 3};
  auto result = solve_greedy(family, requirements, 10);
  CHECK(result.j.range() == std::vector<Nat>{0, 1, 2, 3});
  CHECK(result.unreachable.empty());
  CHECK_FALSE(result.budget_exhausted);
  for (const auto& condition : result.chain) CHECK(is_valid_condition(family, condition));
}

TEST_CASE("solve_greedy: unreachable requirement is reported") {
  Family family = family_of({{0, 1}, {2, 1}, {4, 3}}, 10);
  family.set_nontrivial_witness(0, 1);
  std::vector<Nat> requirements{1, 2};
  auto result = solve_greedy(family, requirements, 10);
  CHECK(result.j.range() == std::vector<Nat>{0, 1});
  CHECK(result.unreachable == std::vector<Nat>{2});
}

TEST_CASE("solve_greedy: budget exhaustion flags the partial result") {
  Family family = make_common_element_family(5, 20, 1);
  std::vector<Nat> requirements{1, 2, 3, 4};
  auto result = solve_greedy(family, requirements, 2);
  CHECK(result.budget_exhausted);
  CHECK(result.unsettled == std::vector<Nat>{3, 4});
  CHECK(result.j.range() == std::vector<Nat>{0, 1, 2});
}

TEST_CASE("solve_greedy output is maximal among the requirement indices") {
  Rng rng(0x77);
  for (int trial = 0; trial < 60; ++trial) {
    Family family = fip::testing::random_family(rng, 2 + rng.below(5), 24, true, 400);
    if (!family.nontrivial()) continue;
    std::vector<Nat> requirements;
    for (Nat i = 0; i < family.index_bound(); ++i) requirements.push_back(i);
    auto result = solve_greedy(family, requirements, 100);
    CHECK(check_property_on(family, result.j.range(), IntersectionProperty::f()).holds());
    auto verdict = is_maximal(family, result.j.range(), IntersectionProperty::f(), requirements);
    CHECK(verdict.outcome == MaximalityVerdict::Outcome::Maximal);
  }
}

TEST_CASE("solve_greedy invokes the pluggable hook between requirements") {
  Family family = make_common_element_family(3, 20, 1);
  int calls = 0;
  auto hook = [&](const Family&, ForcingCondition&) { ++calls; };
  solve_greedy(family, std::vector<Nat>{1, 2}, 10, hook);
  CHECK(calls == 2);
}

TEST_CASE("compute_g examples") {
  Family family = family_of({{0, 9}, {2, 9}}, 12);
  CHECK(compute_g(family, 1) == 9);

  Family disjoint = make_marker_family(4, 10);
  CHECK(compute_g(disjoint, 3) == 6);  // max over singleton witnesses 0,2,4,6

  Family common = family_of({{0, 1}, {2, 1}}, 10);
  CHECK(compute_g(common, 1) == 1);  // the common element is also the least witness
}

TEST_CASE("compute_g flags undecidable truncations") {
  Family family(2, 10);
  family.set_mutable(0).put_in(0);
  family.set_mutable(1).put_in(2);
  CHECK_THROWS_AS(compute_g(family, 1), TruncationError);
}

TEST_CASE("solve_hyperimmune: J(j) <= j and prefixes certified") {
  Rng rng(0x88);
  for (int trial = 0; trial < 30; ++trial) {
    Family family = fip::testing::random_family(rng, 2 + rng.below(5), 24, true, 400);
    Nat steps = 2 * family.index_bound() + 2;
    DominationOracle oracle;
    for (Nat s = 0; s < steps; ++s) oracle.values.push_back(compute_g(family, s) + 1);
    auto result = solve_hyperimmune(family, oracle, steps);
    for (std::size_t j = 0; j < result.j.entries.size(); ++j)
      CHECK(result.j.entries[j] <= j);
    REQUIRE(result.prefix_certs.size() == result.j.entries.size());
    for (std::size_t k = 0; k < result.j.entries.size(); ++k) {
      const auto& cert = result.prefix_certs[k];
      for (Nat i : cert.indices)
        CHECK(family.membership(i, cert.witness) == Membership::In);
    }
  }
}

TEST_CASE("solve_hyperimmune with an escaping oracle is maximal") {
  Rng rng(0x99);
  for (int trial = 0; trial < 50; ++trial) {
    Family family = fip::testing::random_family(rng, 2 + rng.below(5), 24, true, 400);
    Nat steps = 2 * family.index_bound() + 2;
    DominationOracle oracle;
    for (Nat s = 0; s < steps; ++s) oracle.values.push_back(compute_g(family, s) + 1);
    auto result = solve_hyperimmune(family, oracle, steps);
    CHECK(result.maximality.outcome == MaximalityVerdict::Outcome::Maximal);
  }
}

TEST_CASE("solve_hyperimmune with a zero oracle stalls at J = 0") {
  // least witnesses beyond 0: the common element is 1 and markers start at 0,
  // so nothing outside A_0 is permitted at bound 0
  Family family = make_common_element_family(4, 20, 1);
  DominationOracle zero;
  zero.values.assign(10, 0);
  auto result = solve_hyperimmune(family, zero, 10);
  CHECK(result.j.range() == std::vector<Nat>{0});
  CHECK(result.maximality.outcome == MaximalityVerdict::Outcome::Extendable);
}

TEST_CASE("solve_hyperimmune: the common-element family fills in index order") {
  Family family = make_common_element_family(4, 20, 1);
  DominationOracle one;
  one.values.assign(10, 1);
  auto result = solve_hyperimmune(family, one, 10);
  CHECK(result.j.range() == std::vector<Nat>{0, 1, 2, 3});
  // entries arrive ascending: least new index each step
  std::vector<Nat> firsts;
  for (Nat e : result.j.entries)
    if (std::find(firsts.begin(), firsts.end(), e) == firsts.end()) firsts.push_back(e);
  CHECK(std::is_sorted(firsts.begin(), firsts.end()));
}

TEST_CASE("solve_permitting: <0,0> survives every stage") {
  Family family = make_common_element_family(4, 30, 1);
  auto result = solve_permitting(family, ascending_ce(20), 19);
  for (const auto& m : result.state.m_history)
    CHECK(std::binary_search(m.begin(), m.end(), cantor_pair(0, 0)));
}

TEST_CASE("solve_permitting: ascending fresh enumeration reaches maximality") {
  Family family = make_common_element_family(5, 30, 1);
  auto result = solve_permitting(family, ascending_ce(30), 29);
  CHECK(result.j.range() == std::vector<Nat>{0, 1, 2, 3, 4});
  auto verdict = is_maximal(family, result.j.range(), IntersectionProperty::f());
  CHECK(verdict.outcome == MaximalityVerdict::Outcome::Maximal);
  CHECK(audit_permitting(result, ascending_ce(30)).empty());
}

TEST_CASE("solve_permitting: certificates accompany every stage") {
  Rng rng(0xAA);
  for (int trial = 0; trial < 20; ++trial) {
    Family family = fip::testing::random_family(rng, 4, 24, true, 500);
    auto result = solve_permitting(family, ascending_ce(16), 15);
    REQUIRE(result.state.stage_certs.size() == result.state.m_history.size());
    for (const auto& cert : result.state.stage_certs)
      for (Nat i : cert.indices)
        CHECK(family.membership(i, cert.witness) == Membership::In);
  }
}

TEST_CASE("solve_permitting: a frozen enumeration freezes small copies") {
  Family family = make_common_element_family(5, 30, 1);
  // additions stay above 40 from stage 4 on: no changes below 40 afterwards
  CeEnumeration ce;
  ce.added.resize(25);
  for (Nat s = 0; s < 25; ++s) ce.added[s] = {s < 4 ? s : 40 + s};
  auto result = solve_permitting(family, ce, 24);
  const auto& history = result.state.m_history;
  for (Nat s = 4; s + 1 < history.size(); ++s) {
    std::vector<Nat> changed;
    std::set_symmetric_difference(history[s].begin(), history[s].end(), history[s + 1].begin(),
                                  history[s + 1].end(), std::back_inserter(changed));
    for (Nat code : changed) CHECK(code >= 40);
  }
  CHECK(audit_permitting(result, ce).empty());
}

TEST_CASE("solve_permitting: permitting rule audit over varied enumerations") {
  Rng rng(0xBB);
  for (int trial = 0; trial < 40; ++trial) {
    Family family = fip::testing::random_family(rng, 4, 24, true, 450);
    CeEnumeration ce;
    Nat stages = 12 + rng.below(10);
    ce.added.resize(stages);
    Nat next = 0;
    for (Nat s = 0; s < stages; ++s) {
      Nat count = 1 + rng.below(3);
      for (Nat k = 0; k < count; ++k) ce.added[s].push_back(next + rng.below(2) + k * 2);
      std::sort(ce.added[s].begin(), ce.added[s].end());
      ce.added[s].erase(std::unique(ce.added[s].begin(), ce.added[s].end()), ce.added[s].end());
      next = ce.added[s].back() + 1 + rng.below(5);
    }
    auto result = solve_permitting(family, ce, stages - 1);
    CHECK(audit_permitting(result, ce).empty());
    CHECK(check_property_on(family, result.j.range(), IntersectionProperty::f()).holds());
  }
}

TEST_CASE("solve_permitting validates the enumeration contract") {
  Family family = make_common_element_family(3, 20, 1);
  CeEnumeration stalled;
  stalled.added.resize(5);
  stalled.added[0] = {0};
  stalled.added[1] = {1};
  // stages 2..4 add nothing
  CHECK_THROWS_AS(solve_permitting(family, stalled, 4), InputError);

  CHECK_THROWS_AS(solve_permitting(family, ascending_ce(5), 10), InputError);
}

TEST_CASE("ce file round trip") {
  CeEnumeration ce = ascending_ce(6);
  std::string text = format_ce(ce);
  std::istringstream in(text);
  CeEnumeration parsed = parse_ce(in);
  CHECK(format_ce(parsed) == text);
}

TEST_CASE("degenerate family: everything empty except the first set") {
  Family family(4, 10);
  family.set_mutable(0).put_in(1);
  for (Nat i = 0; i < 4; ++i) family.set_mutable(i).raise_frontier(10);

  auto greedy = solve_greedy(family, std::vector<Nat>{1, 2, 3}, 10);
  CHECK(greedy.j.range() == std::vector<Nat>{0});
  CHECK(greedy.unreachable == std::vector<Nat>{1, 2, 3});

  DominationOracle oracle;
  oracle.values.assign(10, 9);
  auto hyper = solve_hyperimmune(family, oracle, 10);
  CHECK(hyper.j.range() == std::vector<Nat>{0});

  CeEnumeration ce;
  ce.added.resize(12);
  for (Nat t = 0; t < 12; ++t) ce.added[t] = {t};
  auto permitting = solve_permitting(family, ce, 11);
  CHECK(permitting.j.range() == std::vector<Nat>{0});
}
