#include "fip/core.hpp"

#include <algorithm>

namespace fip {

namespace {

/// Visit every k-subset of `items` in lexicographic order (items must be
/// sorted). Visitor returns false to stop early.
template <typename Fn>
bool for_each_subset(const std::vector<Nat>& items, std::size_t k, Fn&& visit) {
  if (k > items.size()) return true;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  std::vector<Nat> subset(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) subset[i] = items[pick[i]];
    if (!visit(subset)) return false;
    // advance to next combination
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (pick[i] != i + items.size() - k) {
        ++pick[i];
        for (std::size_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
        break;
      }
      if (i == 0) return true;
    }
    if (k == 0) return true;
  }
}

bool pairwise_distinct(const Family& family, const std::vector<Nat>& subset) {
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b)
      if (!distinct(family, subset[a], subset[b])) return false;
  return true;
}

std::vector<Nat> sorted_unique(std::span<const Nat> xs) {
  std::vector<Nat> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

PropertyVerdict check_subsets(const Family& family, const std::vector<Nat>& pool,
                              const IntersectionProperty& prop) {
  PropertyVerdict verdict;
  verdict.outcome = PropertyVerdict::Outcome::Holds;

  auto visit_size = [&](std::size_t m) {
    return for_each_subset(pool, m, [&](const std::vector<Nat>& subset) {
      if (!pairwise_distinct(family, subset)) return true;
      auto common = least_common_element(family, subset);
      if (prop.kind == IntersectionProperty::Kind::EmptyN) {
        if (common) {
          verdict.outcome = PropertyVerdict::Outcome::Fails;
          verdict.counterexample = subset;
          verdict.counterexample_witness = *common;
          return false;
        }
      } else {
        if (!common) {
          verdict.outcome = PropertyVerdict::Outcome::Fails;
          verdict.counterexample = subset;
          return false;
        }
        verdict.certificates.push_back(WitnessCertificate{subset, *common});
      }
      return true;
    });
  };

  if (prop.kind == IntersectionProperty::Kind::AllFinite) {
    for (std::size_t m = 2; m <= pool.size(); ++m)
      if (!visit_size(m)) break;
  } else {
    visit_size(prop.n);
  }
  return verdict;
}

}  // namespace

bool distinct(const Family& family, Nat i, Nat j) {
  if (i >= family.index_bound() || j >= family.index_bound())
    throw InputError("distinct: index out of bounds");
  if (i == j) return false;
  const StagedSet& a = family.set(i);
  const StagedSet& b = family.set(j);
  for (Nat n = 0; n <= family.universe_bound(); ++n) {
    Membership ma = a.membership(n);
    Membership mb = b.membership(n);
    if (ma == Membership::Undecided || mb == Membership::Undecided) continue;
    if (ma != mb) return true;
  }
  return false;
}

PropertyVerdict check_property(const Family& family, const IntersectionProperty& prop) {
  std::vector<Nat> pool(family.index_bound());
  for (Nat i = 0; i < family.index_bound(); ++i) pool[i] = i;
  return check_property_on(family, pool, prop);
}

PropertyVerdict check_property_on(const Family& family, std::span<const Nat> chosen,
                                  const IntersectionProperty& prop) {
  for (Nat i : chosen)
    if (i >= family.index_bound()) throw InputError("chosen index out of bounds");

  // Fail loudly on undecided elements instead of issuing a silent verdict.
  std::vector<Nat> pool = sorted_unique(chosen);
  for (Nat i : pool) {
    for (Nat n = 0; n <= family.universe_bound(); ++n) {
      if (family.membership(i, n) == Membership::Undecided) {
        PropertyVerdict verdict;
        verdict.outcome = PropertyVerdict::Outcome::Undecided;
        verdict.undecided_at = {i, n};
        return verdict;
      }
    }
  }
  return check_subsets(family, pool, prop);
}

MaximalityVerdict is_maximal(const Family& family, std::span<const Nat> chosen,
                             const IntersectionProperty& prop,
                             std::span<const Nat> candidates) {
  MaximalityVerdict verdict;
  verdict.chosen_check = check_property_on(family, chosen, prop);
  if (verdict.chosen_check.outcome == PropertyVerdict::Outcome::Undecided) {
    verdict.outcome = MaximalityVerdict::Outcome::Undecided;
    return verdict;
  }
  if (verdict.chosen_check.outcome == PropertyVerdict::Outcome::Fails) {
    verdict.outcome = MaximalityVerdict::Outcome::ChosenInvalid;
    return verdict;
  }

  std::vector<Nat> pool = sorted_unique(chosen);
  std::vector<Nat> cand;
  if (candidates.empty()) {
    cand.resize(family.index_bound());
    for (Nat i = 0; i < family.index_bound(); ++i) cand[i] = i;
  } else {
    cand = sorted_unique(candidates);
  }

  for (Nat i : cand) {
    if (i >= family.index_bound()) throw InputError("candidate index out of bounds");
    for (Nat n = 0; n <= family.universe_bound(); ++n) {
      if (family.membership(i, n) == Membership::Undecided) {
        verdict.outcome = MaximalityVerdict::Outcome::Undecided;
        verdict.chosen_check.undecided_at = {i, n};
        return verdict;
      }
    }
    bool is_new = true;
    for (Nat j : pool) {
      if (!distinct(family, i, j)) {
        is_new = false;
        break;
      }
    }
    if (!is_new) continue;
    std::vector<Nat> extended = pool;
    extended.push_back(i);
    std::sort(extended.begin(), extended.end());
    PropertyVerdict check = check_subsets(family, extended, prop);
    if (check.outcome == PropertyVerdict::Outcome::Holds) {
      verdict.outcome = MaximalityVerdict::Outcome::Extendable;
      verdict.extending_index = i;
      return verdict;
    }
  }
  verdict.outcome = MaximalityVerdict::Outcome::Maximal;
  return verdict;
}

IndexRecovery subfamily_index_of(const StagedSet& b) {
  IndexRecovery rec;
  std::vector<Nat> evens;
  for (Nat n : b.decided_in())
    if (n % 2 == 0) evens.push_back(n);
  if (evens.empty()) {
    rec.status = IndexRecovery::Status::MarkerUndecided;
    rec.detail = "marker undecided: no even member decided in";
    return rec;
  }
  if (evens.size() > 1) {
    rec.status = IndexRecovery::Status::Malformed;
    rec.detail = "malformed set: " + std::to_string(evens.size()) + " even members decided in";
    return rec;
  }
  rec.status = IndexRecovery::Status::Ok;
  rec.index = evens.front() / 2;
  return rec;
}

std::optional<std::string> marker_violation(const Family& family, Nat i) {
  const StagedSet& s = family.set(i);
  const Nat marker = 2 * i;
  if (marker <= family.universe_bound() && s.membership(marker) != Membership::In)
    return "set " + std::to_string(i) + " does not contain its marker " + std::to_string(marker);
  for (Nat n : s.decided_in()) {
    if (n % 2 == 0 && n != marker)
      return "set " + std::to_string(i) + " contains foreign even element " + std::to_string(n);
  }
  for (Nat j = 0; 2 * j <= family.universe_bound(); ++j) {
    if (j == i) continue;
    if (s.membership(2 * j) == Membership::In)
      return "set " + std::to_string(i) + " contains foreign marker " + std::to_string(2 * j);
  }
  return std::nullopt;
}

std::optional<Nat> least_common_element(const Family& family, std::span<const Nat> indices) {
  for (Nat n = 0; n <= family.universe_bound(); ++n) {
    bool any_out = false;
    bool any_undecided = false;
    for (Nat i : indices) {
      switch (family.membership(i, n)) {
        case Membership::Out:
          any_out = true;
          break;
        case Membership::Undecided:
          any_undecided = true;
          break;
        case Membership::In:
          break;
      }
      if (any_out) break;
    }
    if (any_out) continue;
    if (any_undecided)
      throw TruncationError("intersection undecidable at truncation: element " +
                            std::to_string(n) + " undecided");
    return n;
  }
  return std::nullopt;
}

}  // namespace fip
