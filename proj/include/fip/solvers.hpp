#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fip/core.hpp"
#include "fip/family.hpp"
#include "fip/family_io.hpp"
#include "fip/trace.hpp"

namespace fip {

/// Cantor pairing, the fixed copy coding <i,n>. Monotone in each argument.
Nat cantor_pair(Nat i, Nat n);
std::pair<Nat, Nat> cantor_unpair(Nat code);

/**
 * A forcing condition: a string whose last entry bounds a common witness
 * for the sets named by all earlier entries. Extension refines the index
 * part and may raise the bound.
 */
struct ForcingCondition {
  std::vector<Nat> entries;  // index part followed by the bound

  std::span<const Nat> index_part() const {
    return entries.empty() ? std::span<const Nat>{}
                           : std::span<const Nat>(entries.data(), entries.size() - 1);
  }
  Nat bound() const { return entries.back(); }
};

bool is_valid_condition(const Family& family, const ForcingCondition& condition);

struct GreedySolveResult {
  IndexMap j;
  std::vector<ForcingCondition> chain;      // one condition per settled step
  std::vector<WitnessCertificate> certs;    // per chain prefix
  std::vector<Nat> unreachable;             // requirements with empty joint intersection
  std::vector<Nat> unsettled;               // requirements left when the budget ran out
  bool budget_exhausted = false;
};

/**
 * Forcing-style greedy solver: starting from the condition <i, a> given by
 * a nontrivial witness, repeatedly extends by the least condition whose
 * index part covers the next requirement. The step that would consult the
 * jump is out of scope and replaced by a pluggable hook (default no-op)
 * invoked between requirements. Output satisfies the full-intersection
 * property with certificates and is maximal among the requirement indices
 * on the truncation.
 */
GreedySolveResult solve_greedy(
    const Family& family, std::span<const Nat> requirements, Nat budget,
    const std::function<void(const Family&, ForcingCondition&)>& jump_hook = {});

/// Least n such that every index set F within {0..s} with nonempty
/// intersection has a witness <= n. Exact at the truncation (the
/// enclosing searches are all bounded), which the CLI flags as
/// "truncation-exact" where the infinite object would consult the jump.
Nat compute_g(const Family& family, Nat s);

struct DominationOracle {
  std::vector<Nat> values;  // f(0..S-1)

  Nat at(Nat s) const {
    if (s >= values.size()) throw InputError("domination oracle queried beyond its window");
    return values[s];
  }
};

struct HyperimmuneSolveResult {
  IndexMap j;
  std::vector<WitnessCertificate> prefix_certs;  // certificate per prefix of j
  MaximalityVerdict maximality;                  // checked against the truncation
};

/**
 * Domination-guided solver: J(0) = 0; J(s+1) is the least new index <= s
 * admitting a witness <= f(s) for its intersection with everything chosen
 * so far, and 0 otherwise. J(j) <= j throughout. Maximality of the result
 * depends on f escaping the family's witness growth; the full-intersection
 * property does not.
 */
HyperimmuneSolveResult solve_hyperimmune(const Family& family, const DominationOracle& oracle,
                                         Nat steps);

struct PermittingState {
  std::vector<Nat> m;                       // current copy codes, ascending
  std::vector<std::vector<Nat>> m_history;  // M_s per stage
  std::vector<WitnessCertificate> stage_certs;
  Trace trace{"permitting"};
};

struct PermittingSolveResult {
  IndexMap j;
  PermittingState state;
};

/**
 * Permitting solver driven by a c.e. enumeration: copies <i,n> enter M
 * only above the least fresh element of the enumeration and above all of
 * M, and leave only when the enumeration changes below their code. M_0
 * carries <0,0> forever.
 */
PermittingSolveResult solve_permitting(const Family& family, const CeEnumeration& ce,
                                       Nat stages);

/// Audits the permitting rule over a recorded run: every change of M at m
/// between consecutive stages is matched by an enumeration change below m.
/// Returns descriptions of violations (empty = clean).
std::vector<std::string> audit_permitting(const PermittingSolveResult& result,
                                          const CeEnumeration& ce);

}  // namespace fip
