#include "fip/oracle.hpp"

#include <algorithm>

namespace fip {

namespace {

/// Decided-in elements of one set flattened to 64-bit words over [0, U].
struct BitRow {
  std::vector<std::uint64_t> words;

  void set(Nat n) { words[n / 64] |= (std::uint64_t{1} << (n % 64)); }
  bool any_and(const BitRow& other) const {
    for (std::size_t w = 0; w < words.size(); ++w)
      if (words[w] & other.words[w]) return true;
    return false;
  }
};

struct Flattened {
  std::vector<BitRow> rows;
  std::vector<Nat> klass;  // extensional class id per index (least index wins)

  BitRow intersect(std::span<const Nat> indices) const {
    BitRow acc = rows[indices.front()];
    for (std::size_t k = 1; k < indices.size(); ++k) {
      const BitRow& r = rows[indices[k]];
      for (std::size_t w = 0; w < acc.words.size(); ++w) acc.words[w] &= r.words[w];
    }
    return acc;
  }

  bool nonempty(const BitRow& row) const {
    for (std::uint64_t w : row.words)
      if (w) return true;
    return false;
  }
};

Flattened flatten(const Family& family) {
  const Nat universe = family.universe_bound();
  const std::size_t words = universe / 64 + 1;
  Flattened flat;
  flat.rows.resize(family.index_bound(), BitRow{std::vector<std::uint64_t>(words, 0)});
  for (Nat i = 0; i < family.index_bound(); ++i) {
    for (Nat n = 0; n <= universe; ++n) {
      switch (family.membership(i, n)) {
        case Membership::In:
          flat.rows[i].set(n);
          break;
        case Membership::Out:
          break;
        case Membership::Undecided:
          throw TruncationError("brute-force oracle needs a fully decided truncation "
                                "(set " + std::to_string(i) + ", element " +
                                std::to_string(n) + " undecided)");
      }
    }
  }
  flat.klass.resize(family.index_bound());
  for (Nat i = 0; i < family.index_bound(); ++i) {
    flat.klass[i] = i;
    for (Nat j = 0; j < i; ++j) {
      if (flat.rows[j].words == flat.rows[i].words) {
        flat.klass[i] = flat.klass[j];
        break;
      }
    }
  }
  return flat;
}

/// Representatives of distinct extensional classes within `chosen`.
std::vector<Nat> distinct_reps(const Flattened& flat, std::span<const Nat> chosen) {
  std::vector<Nat> reps;
  std::vector<Nat> seen;
  for (Nat i : chosen) {
    Nat c = flat.klass[i];
    if (std::find(seen.begin(), seen.end(), c) == seen.end()) {
      seen.push_back(c);
      reps.push_back(i);
    }
  }
  return reps;
}

bool subsets_all(const std::vector<Nat>& reps, std::size_t n, const Flattened& flat,
                 bool want_nonempty) {
  if (reps.size() < n) return true;
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  std::vector<Nat> subset(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) subset[i] = reps[pick[i]];
    bool nonempty = flat.nonempty(flat.intersect(subset));
    if (nonempty != want_nonempty) return false;
    std::size_t i = n;
    bool advanced = false;
    while (i > 0) {
      --i;
      if (pick[i] != i + reps.size() - n) {
        ++pick[i];
        for (std::size_t j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) return true;
  }
}

bool satisfies(const Flattened& flat, std::span<const Nat> chosen,
               const IntersectionProperty& prop) {
  std::vector<Nat> reps = distinct_reps(flat, chosen);
  switch (prop.kind) {
    case IntersectionProperty::Kind::AllFinite:
      // Nonempty intersections are closed downward: all m-subsets meet
      // exactly when the whole collection does.
      if (reps.size() < 2) return true;
      return flat.nonempty(flat.intersect(reps));
    case IntersectionProperty::Kind::NonemptyN:
      return subsets_all(reps, prop.n, flat, true);
    case IntersectionProperty::Kind::EmptyN:
      return subsets_all(reps, prop.n, flat, false);
  }
  return false;
}

}  // namespace

bool brute_force_satisfies(const Family& family, std::span<const Nat> chosen,
                           const IntersectionProperty& prop) {
  Flattened flat = flatten(family);
  return satisfies(flat, chosen, prop);
}

std::vector<std::vector<Nat>> brute_force_maximal(const Family& family,
                                                  const IntersectionProperty& prop,
                                                  Nat index_guard) {
  const Nat count = family.index_bound();
  if (count > index_guard)
    throw InputError("brute_force_maximal guard exceeded: index_bound " +
                     std::to_string(count) + " > " + std::to_string(index_guard));
  Flattened flat = flatten(family);

  const std::uint64_t limit = std::uint64_t{1} << count;
  std::vector<bool> good(limit, false);
  std::vector<std::vector<Nat>> members(limit);
  for (std::uint64_t mask = 0; mask < limit; ++mask) {
    std::vector<Nat>& chosen = members[mask];
    for (Nat i = 0; i < count; ++i)
      if (mask & (std::uint64_t{1} << i)) chosen.push_back(i);
    if (chosen.empty()) continue;
    good[mask] = satisfies(flat, chosen, prop);
  }

  std::vector<std::vector<Nat>> maximal;
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    if (!good[mask]) continue;
    bool extendable = false;
    for (Nat i = 0; i < count && !extendable; ++i) {
      if (mask & (std::uint64_t{1} << i)) continue;
      bool is_new = true;
      for (Nat j : members[mask]) {
        if (flat.klass[j] == flat.klass[i]) {
          is_new = false;
          break;
        }
      }
      if (!is_new) continue;
      if (good[mask | (std::uint64_t{1} << i)]) extendable = true;
    }
    if (!extendable) maximal.push_back(members[mask]);
  }
  return maximal;
}

}  // namespace fip
