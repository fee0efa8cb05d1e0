#include "fip/genericity.hpp"

#include <algorithm>

namespace fip {

namespace {

constexpr Nat kWindowCeiling = Nat{1} << 62;

enum class Scan { Found, None, Undecidable };

struct ScanResult {
  Scan status = Scan::None;
  Nat witness = 0;
};

/// Least x <= bound decided into every listed set, where bound may exceed
/// the universe (the scan stops at the truncation). A position that no
/// set rules out but some set leaves undecided makes the scan
/// Undecidable rather than None.
ScanResult bounded_witness(const Family& family, std::span<const Nat> indices, Nat bound) {
  Nat top = std::min(bound, family.universe_bound());
  bool ambiguous = false;
  for (Nat x = 0; x <= top; ++x) {
    bool all_in = true;
    bool ruled_out = false;
    for (Nat i : indices) {
      Membership m = family.membership(i, x);
      if (m == Membership::Out) ruled_out = true;
      if (m != Membership::In) all_in = false;
    }
    if (all_in) return {Scan::Found, x};
    if (!ruled_out) ambiguous = true;
  }
  return {ambiguous ? Scan::Undecidable : Scan::None, 0};
}

bool indices_in_bounds(const Family& family, std::span<const Nat> tau) {
  for (Nat i : tau)
    if (i >= family.index_bound()) return false;
  return true;
}

bool is_proper_extension(std::span<const Nat> shorter, std::span<const Nat> longer) {
  if (longer.size() <= shorter.size()) return false;
  return std::equal(shorter.begin(), shorter.end(), longer.begin());
}

}  // namespace

Coding::Coding(Nat max_len, Nat alphabet) : max_len_(max_len), alphabet_(alphabet) {
  if (alphabet_ < 1) throw InputError("coding alphabet must be nonempty");
  block_start_.resize(max_len_ + 2);
  block_start_[0] = 0;
  Nat block = 1;  // alphabet^length
  for (Nat len = 0; len <= max_len_; ++len) {
    block_start_[len + 1] = block_start_[len] + block;
    if (block > kWindowCeiling / alphabet_)
      throw InputError("coding window overflows; shrink max_len or alphabet");
    block *= alphabet_;
    if (block_start_[len + 1] > kWindowCeiling)
      throw InputError("coding window overflows; shrink max_len or alphabet");
  }
  window_ = block_start_[max_len_ + 1];
}

Coding Coding::for_family(const Family& family) {
  Nat alphabet = std::max(family.universe_bound() + 1, family.index_bound());
  Nat max_len = family.index_bound() + 4;
  return Coding(max_len, alphabet);
}

Nat Coding::block_start(Nat length) const {
  if (length > max_len_ + 1) throw InputError("coding length beyond window");
  return block_start_[length];
}

std::vector<Nat> Coding::decode(Nat code) const {
  if (code >= window_) throw InputError("code beyond coding window");
  Nat length = 0;
  while (block_start_[length + 1] <= code) ++length;
  Nat offset = code - block_start_[length];
  std::vector<Nat> s(length);
  for (Nat k = length; k > 0; --k) {
    s[k - 1] = offset % alphabet_;
    offset /= alphabet_;
  }
  return s;
}

Nat Coding::encode(std::span<const Nat> s) const {
  if (s.size() > max_len_) throw InputError("string too long for coding window");
  Nat offset = 0;
  for (Nat entry : s) {
    if (entry >= alphabet_) throw InputError("string entry beyond coding alphabet");
    offset = offset * alphabet_ + entry;
  }
  return block_start_[s.size()] + offset;
}

bool BitString::bit(Nat n) const {
  if (n >= length) return false;
  return std::binary_search(ones.begin(), ones.end(), n);
}

BitString BitString::prefix(Nat t) const {
  BitString p;
  p.length = std::min(t, length);
  for (Nat n : ones) {
    if (n >= p.length) break;
    p.ones.push_back(n);
  }
  return p;
}

void BitString::append_one_at(Nat position) {
  if (position < length) throw InputError("cannot set a bit inside the fixed prefix");
  ones.push_back(position);
  length = position + 1;
}

AcceptableNumbers acceptable_numbers(const BitString& sigma, const Family& family,
                                     const Coding& coding) {
  AcceptableNumbers out;
  for (Nat n : sigma.ones) {
    if (n >= sigma.length) break;
    std::vector<Nat> code = coding.decode(n);
    if (code.empty()) continue;  // the empty string is not of the form tau·b
    AcceptableEntry entry;
    entry.position = n;
    entry.tau.assign(code.begin(), code.end() - 1);
    entry.bound = code.back();
    if (!indices_in_bounds(family, entry.tau)) continue;
    ScanResult scan = bounded_witness(family, entry.tau, entry.bound);
    if (scan.status == Scan::Undecidable) {
      out.undecidable.push_back(n);
      continue;
    }
    if (scan.status != Scan::Found) continue;
    entry.witness = scan.witness;
    out.entries.push_back(std::move(entry));
  }
  return out;
}

AcceptableSequence acceptable_sequence(const BitString& sigma, const Family& family,
                                       const Coding& coding) {
  AcceptableSequence seq;
  AcceptableNumbers acceptable = acceptable_numbers(sigma, family, coding);
  for (const AcceptableEntry& entry : acceptable.entries) {
    if (seq.entries.empty()) {
      seq.entries.push_back(entry);
      continue;
    }
    const auto& prev = seq.entries.back().tau;
    if (is_proper_extension(prev, entry.tau)) seq.entries.push_back(entry);
  }
  return seq;
}

DenseVerdict dense_membership(const DenseSetQuery& query, const BitString& sigma,
                              const Family& family, const Coding& coding) {
  DenseVerdict verdict;
  verdict.truncation_exact = query.budget >= family.universe_bound();
  AcceptableSequence seq = acceptable_sequence(sigma, family, coding);
  if (seq.empty()) return verdict;
  const auto& tau = seq.final_tau();
  for (Nat entry : tau) {
    if (entry == query.index) {
      verdict.member = true;
      verdict.via = DenseVerdict::Via::Enumerates;
      return verdict;
    }
  }
  if (query.index >= family.index_bound())
    throw InputError("dense set index out of bounds");
  std::vector<Nat> joined(tau.begin(), tau.end());
  joined.push_back(query.index);
  if (bounded_witness(family, joined, query.budget).status == Scan::None) {
    verdict.member = true;
    verdict.via = DenseVerdict::Via::EmptyAtBudget;
  }
  return verdict;
}

GenericBuildResult build_generic(const Family& family, const Coding& coding,
                                 std::span<const DenseSetQuery> targets) {
  GenericBuildResult result;

  // Degenerate family: no set ever accepts a witness, so no dense set is
  // meetable through the chain machinery.
  bool any_inhabited = false;
  for (Nat i = 0; i < family.index_bound(); ++i)
    if (!family.set(i).empty_decided()) any_inhabited = true;
  if (!targets.empty() && !any_inhabited)
    throw InputError("build_generic: every set is empty at the truncation");

  for (const DenseSetQuery& target : targets) {
    // Already met at some prefix? The acceptable sequence only changes at
    // one-positions, so those prefixes decide it.
    bool met = false;
    {
      std::vector<Nat> cuts;
      for (Nat n : result.g.ones) cuts.push_back(n + 1);
      if (result.g.length > 0 && (cuts.empty() || cuts.back() != result.g.length))
        cuts.push_back(result.g.length);
      for (Nat cut : cuts) {
        if (dense_membership(target, result.g.prefix(cut), family, coding).member) {
          result.met_at.emplace_back(target.index, cut);
          met = true;
          break;
        }
      }
    }
    if (met) continue;

    AcceptableSequence seq = acceptable_sequence(result.g, family, coding);
    std::vector<Nat> tau_cur;
    if (!seq.empty()) tau_cur = seq.final_tau();

    // Least one-position whose code tau_cur + j (optionally padded) · b
    // keeps the chain growing and satisfies the target.
    std::optional<Nat> best_position;
    for (Nat pad = 0; !best_position && tau_cur.size() + 1 + pad <= coding.max_len() - 1;
         ++pad) {
      for (Nat j = 0; j < std::min<Nat>(coding.alphabet(), family.index_bound()); ++j) {
        std::vector<Nat> tau = tau_cur;
        tau.push_back(j);
        for (Nat k = 0; k < pad; ++k) tau.push_back(j);
        ScanResult scan = bounded_witness(family, tau, family.universe_bound());
        if (scan.status != Scan::Found) continue;
        bool enumerates = false;
        for (Nat entry : tau)
          if (entry == target.index) enumerates = true;
        if (!enumerates) {
          std::vector<Nat> joined = tau;
          joined.push_back(target.index);
          if (bounded_witness(family, joined, target.budget).status != Scan::None)
            continue;  // neither clause holds
        }
        // least bound >= witness placing the code at or past the frontier
        tau.push_back(0);
        Nat code0 = coding.encode(tau);
        tau.pop_back();
        Nat b = scan.witness;
        if (code0 + b < result.g.length) b = result.g.length - code0;
        if (b >= coding.alphabet()) continue;  // try longer padding
        Nat position = code0 + b;
        if (!best_position || position < *best_position) best_position = position;
      }
    }
    if (!best_position)
      throw TruncationError("build_generic: extension search exhausted the window for "
                            "target " + std::to_string(target.index));
    result.g.append_one_at(*best_position);
    result.met_at.emplace_back(target.index, result.g.length);
  }
  return result;
}

SubfamilyExtraction extract_subfamily(const BitString& g, const Family& family,
                                      const Coding& coding) {
  SubfamilyExtraction out;
  AcceptableSequence seq = acceptable_sequence(g, family, coding);
  if (seq.empty())
    throw InputError("extract_subfamily: no prefix of g has a nonempty acceptable sequence");

  // Final witness strings across prefixes are exactly the chain prefixes;
  // coherence (each extending the last) is structural, but verify anyway.
  for (std::size_t t = 0; t + 1 < seq.entries.size(); ++t) {
    if (!is_proper_extension(seq.entries[t].tau, seq.entries[t + 1].tau))
      throw ContractViolation("extract_subfamily: witness chain lost coherence");
    out.tau_chain.push_back(seq.entries[t].tau);
  }
  out.tau_chain.push_back(seq.entries.back().tau);

  out.j.entries = seq.final_tau();
  for (std::size_t k = 1; k <= out.j.entries.size(); ++k) {
    std::vector<Nat> prefix(out.j.entries.begin(), out.j.entries.begin() + k);
    std::sort(prefix.begin(), prefix.end());
    prefix.erase(std::unique(prefix.begin(), prefix.end()), prefix.end());
    auto witness = least_common_element(family, prefix);
    if (!witness)
      throw ContractViolation("extract_subfamily: prefix lost its certificate");
    out.prefix_certs.push_back(WitnessCertificate{prefix, *witness});
  }

  for (Nat i = 0; i < family.index_bound(); ++i) {
    DenseSetQuery query{i, family.universe_bound()};
    for (const auto& entry : seq.entries) {
      if (dense_membership(query, g.prefix(entry.position + 1), family, coding).member) {
        out.met_targets.push_back(i);
        break;
      }
    }
  }

  out.maximality =
      is_maximal(family, out.j.range(), IntersectionProperty::f(), out.met_targets);
  return out;
}

}  // namespace fip
