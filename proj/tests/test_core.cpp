#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "fip/core.hpp"
#include "fip/family.hpp"
#include "fip/family_io.hpp"
#include "fip/oracle.hpp"
#include "test_support.hpp"

using namespace fip;
using fip::testing::family_of;
using fip::testing::Rng;

TEST_CASE("staged set membership is tri-state and monotone") {
  StagedSet s(3);
  CHECK(s.membership(5) == Membership::Undecided);
  s.put_in(5);
  CHECK(s.membership(5) == Membership::In);
  s.put_out(7);
  CHECK(s.membership(7) == Membership::Out);
  CHECK_THROWS_AS(s.put_out(5), ContractViolation);
  CHECK_THROWS_AS(s.put_in(7), ContractViolation);
  s.raise_frontier(10);
  CHECK(s.membership(9) == Membership::Out);
  CHECK(s.membership(5) == Membership::In);
  CHECK(s.membership(11) == Membership::Undecided);
  CHECK_THROWS_AS(s.put_in(9), ContractViolation);
  CHECK(s.least_element() == 5);
}

TEST_CASE("distinct: marker pairs, identical index, extensional equality") {
  Family markers = make_marker_family(3, 10);
  CHECK(distinct(markers, 0, 1));
  CHECK_FALSE(distinct(markers, 2, 2));

  Family twins = family_of({{5}, {5}}, 10);
  CHECK_FALSE(distinct(twins, 0, 1));

  CHECK_THROWS_AS(distinct(markers, 0, 3), InputError);
}

TEST_CASE("check_property: pairwise disjoint singletons satisfy D_2") {
  Family family = family_of({{0}, {2}, {4}}, 10);
  auto verdict = check_property(family, IntersectionProperty::d(2));
  CHECK(verdict.outcome == PropertyVerdict::Outcome::Holds);
}

TEST_CASE("check_property: common element family satisfies F with witness 1") {
  Family family = family_of({{0, 1}, {2, 1}, {4, 1}}, 10);
  auto verdict = check_property(family, IntersectionProperty::f());
  REQUIRE(verdict.outcome == PropertyVerdict::Outcome::Holds);
  for (const auto& cert : verdict.certificates) CHECK(cert.witness == 1);
  // one certificate per subset of size 2 and 3
  CHECK(verdict.certificates.size() == 3 + 1);
}

TEST_CASE("check_property fails loudly on undecided truncations") {
  Family family(2, 10);
  family.set_mutable(0).put_in(0);
  family.set_mutable(1).put_in(2);
  // no frontier: odd elements undecided
  auto verdict = check_property(family, IntersectionProperty::dbar(2));
  CHECK(verdict.outcome == PropertyVerdict::Outcome::Undecided);
  REQUIRE(verdict.undecided_at.has_value());
  CHECK(verdict.undecided_at->first == 0);
  CHECK(verdict.undecided_at->second == 1);
}

TEST_CASE("check_property agrees with the exhaustive oracle on random families") {
  Rng rng(0xC0FFEE);
  int disagreements = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Nat index_bound = 1 + rng.below(6);
    Nat universe = 5 + rng.below(36);
    bool markers = rng.chance_permille(500);
    Family family = fip::testing::random_family(rng, index_bound, universe, markers);
    for (const auto& prop :
         {IntersectionProperty::f(), IntersectionProperty::dbar(2), IntersectionProperty::dbar(3),
          IntersectionProperty::d(2), IntersectionProperty::d(3)}) {
      auto verdict = check_property(family, prop);
      REQUIRE(verdict.outcome != PropertyVerdict::Outcome::Undecided);
      bool expected = fip::testing::oracle_property_holds(family, prop);
      if (verdict.holds() != expected) ++disagreements;
    }
  }
  CHECK(disagreements == 0);
}

TEST_CASE("F implies Dbar_n at the checker level") {
  Rng rng(0xFEED);
  for (int trial = 0; trial < 100; ++trial) {
    Nat index_bound = 2 + rng.below(4);
    Family family = fip::testing::random_family(rng, index_bound, 20, true, 450);
    if (!check_property(family, IntersectionProperty::f()).holds()) continue;
    for (Nat n = 2; n <= index_bound; ++n)
      CHECK(check_property(family, IntersectionProperty::dbar(n)).holds());
  }
}

TEST_CASE("is_maximal: examples from the contract") {
  Family family = family_of({{0, 1}, {2, 1}, {4, 3}}, 10);

  std::vector<Nat> chosen{0, 1};
  auto verdict = is_maximal(family, chosen, IntersectionProperty::dbar(2));
  CHECK(verdict.outcome == MaximalityVerdict::Outcome::Maximal);

  std::vector<Nat> just_zero{0};
  verdict = is_maximal(family, just_zero, IntersectionProperty::dbar(2));
  REQUIRE(verdict.outcome == MaximalityVerdict::Outcome::Extendable);
  CHECK(verdict.extending_index == 1);

  Family common = family_of({{0, 1}, {2, 1}, {4, 1}}, 10);
  std::vector<Nat> all{0, 1, 2};
  verdict = is_maximal(common, all, IntersectionProperty::f());
  CHECK(verdict.outcome == MaximalityVerdict::Outcome::Maximal);
}

TEST_CASE("is_maximal: invalid chosen subfamily is an error, not non-maximality") {
  Family family = family_of({{0}, {2}, {4, 1}}, 10);
  std::vector<Nat> chosen{0, 1};  // disjoint pair fails Dbar_2
  auto verdict = is_maximal(family, chosen, IntersectionProperty::dbar(2));
  CHECK(verdict.outcome == MaximalityVerdict::Outcome::ChosenInvalid);
}

TEST_CASE("is_maximal is monotone in chosen along extending indices") {
  Rng rng(0xAB);
  for (int trial = 0; trial < 60; ++trial) {
    Family family = fip::testing::random_family(rng, 2 + rng.below(4), 24, true, 400);
    std::vector<Nat> chosen;
    // grow from the first singleton that satisfies F
    chosen.push_back(0);
    std::vector<Nat> seen_extenders;
    while (true) {
      auto verdict = is_maximal(family, chosen, IntersectionProperty::f());
      if (verdict.outcome != MaximalityVerdict::Outcome::Extendable) break;
      Nat ext = *verdict.extending_index;
      for (Nat old : seen_extenders) CHECK(old != ext);
      seen_extenders.push_back(ext);
      chosen.push_back(ext);
    }
  }
}

TEST_CASE("subfamily_index_of recovers the marker index") {
  StagedSet b(0);
  for (Nat n : {6, 1, 3}) b.put_in(n);
  auto rec = subfamily_index_of(b);
  REQUIRE(rec.status == IndexRecovery::Status::Ok);
  CHECK(rec.index == 3);

  StagedSet zero(0);
  zero.put_in(0);
  rec = subfamily_index_of(zero);
  REQUIRE(rec.status == IndexRecovery::Status::Ok);
  CHECK(rec.index == 0);

  StagedSet odd_only(0);
  for (Nat n : {1, 3, 5}) odd_only.put_in(n);
  CHECK(subfamily_index_of(odd_only).status == IndexRecovery::Status::MarkerUndecided);

  StagedSet two_even(0);
  for (Nat n : {2, 4}) two_even.put_in(n);
  CHECK(subfamily_index_of(two_even).status == IndexRecovery::Status::Malformed);
}

TEST_CASE("index recovery round-trips over marker families") {
  Rng rng(0x5EED);
  Family family = fip::testing::random_family(rng, 6, 30, true);
  for (Nat i = 0; i < family.index_bound(); ++i) {
    auto rec = subfamily_index_of(family.set(i));
    REQUIRE(rec.status == IndexRecovery::Status::Ok);
    CHECK(rec.index == i);
  }
}

TEST_CASE("family file round trip") {
  Family family = family_of({{0, 1, 5}, {2, 5}, {4}}, 12);
  family.set_nontrivial_witness(0, 1);
  std::string text = format_family(family);
  Family parsed = parse_family_text(text);
  CHECK(format_family(parsed) == text);
  CHECK(parsed.index_bound() == 3);
  CHECK(parsed.universe_bound() == 12);
  CHECK(parsed.membership(1, 5) == Membership::In);
  CHECK(parsed.membership(1, 3) == Membership::Out);
  CHECK(parsed.nontrivial_witness() == std::make_pair(Nat{0}, Nat{1}));

  // compact form: unlisted sets denote marker singletons
  Family markers = make_marker_family(4, 10);
  std::string compact = format_family(markers, true);
  Family reparsed = parse_family_text(compact);
  CHECK(format_family(reparsed) == format_family(markers));
}

TEST_CASE("family file rejects malformed input") {
  CHECK_THROWS_AS(parse_family_text("family v2 I=1 U=3\n"), InputError);
  CHECK_THROWS_AS(parse_family_text("family v1 I=1\n"), InputError);
  CHECK_THROWS_AS(parse_family_text("family v1 I=2 U=3\nset 0:\n"), InputError);  // missing set 1
  CHECK_THROWS_AS(parse_family_text("family v1 I=1 U=3\nset 0: 2 1\n"), InputError);  // unsorted
  CHECK_THROWS_AS(parse_family_text("family v1 I=1 U=3\nset 0: 9\n"), InputError);  // > U
  CHECK_THROWS_AS(parse_family_text("family v1 I=1 U=3\nset 0: 1\nset 0: 1\n"), InputError);
}

TEST_CASE("generator families") {
  Family common = parse_family_text("family v1 I=4 U=21\ngen common w=9\n");
  CHECK(check_property(common, IntersectionProperty::f()).holds());
  Family disjoint = parse_family_text("family v1 I=4 U=21\ngen disjoint\n");
  CHECK(check_property(disjoint, IntersectionProperty::d(2)).holds());
  Family random_a = parse_family_text("family v1 I=4 U=21\ngen random seed=7 density=400\n");
  Family random_b = parse_family_text("family v1 I=4 U=21\ngen random seed=7 density=400\n");
  CHECK(format_family(random_a) == format_family(random_b));
}

TEST_CASE("brute_force_maximal: disjoint family yields the singletons") {
  Family family = family_of({{0}, {2}, {4}}, 10);
  auto solutions = brute_force_maximal(family, IntersectionProperty::dbar(2));
  REQUIRE(solutions.size() == 3);
  CHECK(solutions[0] == std::vector<Nat>{0});
  CHECK(solutions[1] == std::vector<Nat>{1});
  CHECK(solutions[2] == std::vector<Nat>{2});
}

TEST_CASE("brute_force_maximal: common-element family yields the full index set") {
  Family family = make_common_element_family(4, 20, 9);
  auto solutions = brute_force_maximal(family, IntersectionProperty::f());
  REQUIRE(solutions.size() == 1);
  CHECK(solutions[0] == std::vector<Nat>{0, 1, 2, 3});
}

TEST_CASE("brute_force_maximal solutions pass is_maximal and vice versa") {
  Rng rng(0x1234);
  for (int trial = 0; trial < 80; ++trial) {
    Family family = fip::testing::random_family(rng, 1 + rng.below(5), 20, true, 400);
    for (const auto& prop : {IntersectionProperty::f(), IntersectionProperty::dbar(2)}) {
      auto solutions = brute_force_maximal(family, prop);
      CHECK(!solutions.empty());
      for (const auto& chosen : solutions) {
        auto verdict = is_maximal(family, chosen, prop);
        CHECK(verdict.outcome == MaximalityVerdict::Outcome::Maximal);
      }
    }
  }
}

TEST_CASE("brute_force_maximal guards its exponential bound") {
  Family family = make_marker_family(13, 30);
  CHECK_THROWS_AS(brute_force_maximal(family, IntersectionProperty::f()), InputError);
}
