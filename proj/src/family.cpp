#include "fip/family.hpp"

#include <algorithm>

namespace fip {

namespace {

bool sorted_contains(const std::vector<Nat>& v, Nat n) {
  return std::binary_search(v.begin(), v.end(), n);
}

void sorted_insert(std::vector<Nat>& v, Nat n) {
  auto it = std::lower_bound(v.begin(), v.end(), n);
  if (it == v.end() || *it != n) v.insert(it, n);
}

}  // namespace

void StagedSet::advance_stage(Nat s) {
  if (s < stage_) throw ContractViolation("stage may not go backwards");
  stage_ = s;
}

Membership StagedSet::membership(Nat n) const {
  if (sorted_contains(in_, n)) return Membership::In;
  if (sorted_contains(out_, n)) return Membership::Out;
  if (frontier_ && n <= *frontier_) return Membership::Out;
  return Membership::Undecided;
}

void StagedSet::put_in(Nat n) {
  switch (membership(n)) {
    case Membership::In:
      return;
    case Membership::Out:
      throw ContractViolation("element " + std::to_string(n) +
                              " already decided out of set " + std::to_string(index_));
    case Membership::Undecided:
      sorted_insert(in_, n);
  }
}

void StagedSet::put_out(Nat n) {
  switch (membership(n)) {
    case Membership::Out:
      return;
    case Membership::In:
      throw ContractViolation("element " + std::to_string(n) +
                              " already decided into set " + std::to_string(index_));
    case Membership::Undecided:
      sorted_insert(out_, n);
  }
}

void StagedSet::raise_frontier(Nat f) {
  if (frontier_ && *frontier_ >= f) return;
  frontier_ = f;
}

std::optional<Nat> StagedSet::least_element() const {
  if (in_.empty()) return std::nullopt;
  return in_.front();
}

Family::Family(Nat index_bound, Nat universe_bound) : universe_bound_(universe_bound) {
  sets_.reserve(index_bound);
  for (Nat i = 0; i < index_bound; ++i) sets_.emplace_back(i);
}

const StagedSet& Family::set(Nat i) const {
  if (i >= sets_.size())
    throw InputError("set index " + std::to_string(i) + " out of bounds (index_bound " +
                     std::to_string(sets_.size()) + ")");
  return sets_[i];
}

StagedSet& Family::set_mutable(Nat i) {
  if (i >= sets_.size())
    throw InputError("set index " + std::to_string(i) + " out of bounds (index_bound " +
                     std::to_string(sets_.size()) + ")");
  return sets_[i];
}

void Family::set_nontrivial_witness(Nat i, Nat a) {
  if (set(i).membership(a) != Membership::In)
    throw InputError("nontrivial witness " + std::to_string(a) + " not decided into set " +
                     std::to_string(i));
  witness_ = {i, a};
}

std::optional<std::pair<Nat, Nat>> Family::find_nontrivial_witness() const {
  for (Nat i = 0; i < index_bound(); ++i) {
    auto least = sets_[i].least_element();
    if (least) return std::make_pair(i, *least);
  }
  return std::nullopt;
}

std::optional<std::pair<Nat, Nat>> Family::first_undecided() const {
  for (Nat i = 0; i < index_bound(); ++i) {
    for (Nat n = 0; n <= universe_bound_; ++n) {
      if (sets_[i].membership(n) == Membership::Undecided) return std::make_pair(i, n);
    }
  }
  return std::nullopt;
}

std::vector<Nat> IndexMap::range() const {
  std::vector<Nat> r = entries;
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

IntersectionProperty IntersectionProperty::d(Nat n) {
  if (n < 2) throw InputError("D_n requires n >= 2");
  return {Kind::EmptyN, n};
}

IntersectionProperty IntersectionProperty::dbar(Nat n) {
  if (n < 2) throw InputError("Dbar_n requires n >= 2");
  return {Kind::NonemptyN, n};
}

IntersectionProperty IntersectionProperty::f() { return {Kind::AllFinite, 2}; }

std::string IntersectionProperty::name() const {
  switch (kind) {
    case Kind::EmptyN:
      return "D" + std::to_string(n);
    case Kind::NonemptyN:
      return "Dbar" + std::to_string(n);
    case Kind::AllFinite:
      return "F";
  }
  return "?";
}

IntersectionProperty IntersectionProperty::parse(const std::string& text) {
  if (text == "F" || text == "f") return f();
  auto tail_number = [&](std::size_t prefix_len) -> Nat {
    const std::string digits = text.substr(prefix_len);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw InputError("cannot parse intersection property '" + text + "'");
    return static_cast<Nat>(std::stoull(digits));
  };
  if (text.rfind("Dbar", 0) == 0) return dbar(tail_number(4));
  if (text.rfind("dbar", 0) == 0) return dbar(tail_number(4));
  if (text.rfind("D", 0) == 0 || text.rfind("d", 0) == 0) return d(tail_number(1));
  throw InputError("cannot parse intersection property '" + text +
                   "' (expected F, D<n>, or Dbar<n>)");
}

bool operator==(const WitnessCertificate& a, const WitnessCertificate& b) {
  return a.indices == b.indices && a.witness == b.witness;
}

bool operator==(const IntersectionProperty& a, const IntersectionProperty& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == IntersectionProperty::Kind::AllFinite) return true;
  return a.n == b.n;
}

}  // namespace fip
