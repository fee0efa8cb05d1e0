#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fip/construction.hpp"
#include "fip/family.hpp"
#include "fip/trace.hpp"

namespace fip {

/// One newly revealed value of an opponent's partial function.
struct Convergence {
  Nat arg = 0;
  Nat value = 0;
};

struct StrategyView {
  Nat stage = 0;
  const ConstructionFamily& family;
  /// (arg, value) pairs already released for this opponent, in release order.
  std::span<const std::pair<Nat, Nat>> released;
  /// Designated (potential and trap) set indices in definition order.
  std::span<const Nat> designated;
};

/**
 * An opponent revealing a partial function by stages. Revelation is
 * monotone: once emitted, an argument's value is fixed; re-emitting an
 * argument violates the contract. The harness normalizes timing (one
 * release per stage, arguments in order) and withholds computations that
 * would break the pairwise-witness convention, re-releasing them once the
 * witnesses exist.
 */
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  virtual void reset() = 0;
  virtual std::vector<Convergence> step(const StrategyView& view) = 0;
};

using StrategyList = std::vector<std::unique_ptr<Strategy>>;

/// Strategy spec file:  strategies v1  /  one line per opponent:
///   silent | greedy delay=<d> | script <a>=<i>@<s> ...
StrategyList parse_strategies(std::istream& in);
StrategyList parse_strategies_file(const std::string& path);

/// The fixed ten-opponent suite used by the acceptance run.
StrategyList builtin_strategy_suite();
std::string builtin_strategy_suite_text();

struct AdversaryParams {
  Nat stages = 100;
  /// String-space truncation: strings considered in the full construction
  /// have length at most this.
  Nat max_sigma_len = 4;
};

struct PotentialRecord {
  Nat set_index = 0;
  Nat substage = 0;
  std::vector<Nat> owner;
  int label = 2;  // 1 or 2; label 1 may be relabeled to 2 once
  Nat defined_stage = 0;
  Nat defined_seq = 0;  // global definition order
};

struct ConvergenceRecord {
  Nat arg = 0;
  Nat value = 0;
  Nat stage = 0;  // the stage the computation was released at
};

struct AdversaryResult {
  ConstructionFamily family;
  Trace trace;
  Nat stages = 0;

  std::vector<std::string> strategy_names;
  std::vector<std::vector<ConvergenceRecord>> released;   // per opponent
  std::vector<std::vector<Nat>> deferred_args;            // per opponent: args withheld at least once
  std::vector<std::vector<Nat>> traps;                    // per opponent: trap indices in definition order
  std::vector<std::vector<PotentialRecord>> potentials;   // per opponent, definition order
  std::vector<std::vector<Nat>> progressive_stages;       // per opponent

  /// Full construction only: every string ever bounded, in discovery
  /// order, with the first stage that bounded it.
  std::vector<std::vector<Nat>> bounded_strings;
  std::vector<Nat> first_bounded;

  Nat convergence_stage(Nat e, Nat a) const;  // s_{e,a}; throws if undefined
  bool has_convergence(Nat e, Nat a) const;
  bool respects_convention(Nat e) const { return deferred_args[e].empty(); }
};

/// The motivating diagonalization: per-opponent potential sets chased
/// through the enumeration, a trap set fed at progressive stages.
AdversaryResult run_warmup(StrategyList& strategies, const AdversaryParams& params);

/// The full five-step construction over bounded strings.
AdversaryResult run_full(StrategyList& strategies, const AdversaryParams& params);

/// A nonempty string is bounded by s when its length and entries stay
/// below s and, beyond length one, all pairs of enumerated sets carry a
/// witness <= s-1 at the end of stage s-1.
bool is_bounded(std::span<const Nat> sigma, Nat s, const ConstructionFamily& family);

struct WitnessFunction {
  std::vector<Nat> f;
  std::vector<std::vector<Nat>> chain;  // sigma_0, sigma_1, ... prefixes of j
  bool partial = false;                 // the truncation ran out of qualifying prefixes
};

/**
 * The witness function of a pairwise-certified index prefix: f(0) twice
 * the first index, f(a+1) the least stage admitting a longer prefix that
 * is bounded and enumerates potential sets of every substage <= a defined
 * by then, with owners between the previous chain link and itself.
 */
WitnessFunction extract_witness_function(const IndexMap& j_prefix, const AdversaryResult& run);

// ---- audits over a recorded run (empty result = clean) ----------------

/// No index is designated twice (across potentials of every substage and
/// all trap definitions).
std::vector<std::string> audit_freshness(const AdversaryResult& run);

/// Every intersection of a type-2 potential set with its own substage's
/// current trap happens at step 4 of that substage of a progressive stage.
std::vector<std::string> audit_type2_discipline(const AdversaryResult& run);

/// Each trap is redefined at most once, exactly at the release stage of
/// the opponent's first convergence.
std::vector<std::string> audit_trap_redefinitions(const AdversaryResult& run);

/// Step-5 contract: every enumerated element lies within the final
/// totalization frontier.
std::vector<std::string> audit_totality(const AdversaryResult& run);

/// Warmup engine: at every progressive stage some enumerated set is still
/// disjoint from the trap.
std::vector<std::string> audit_warmup_trap_disjointness(const AdversaryResult& run);

/// Recompute opponent e's viability layers from a recorded run: layer a
/// holds the strings viable at the release stage of argument a.
std::vector<std::vector<std::vector<Nat>>> viability_layers(const AdversaryResult& run, Nat e);

/// The engine behind the diagonalization: every string viable at a
/// convergence stage keeps some enumerated set disjoint from the trap
/// until the next progressive stage (or the end of the run).
std::vector<std::string> audit_trap_evasion(const AdversaryResult& run, Nat e);

/**
 * A pairwise-certified index prefix for witness extraction, built in
 * rounds: each round appends, per substage, the first potential set owned
 * at or beyond the previous round's spine that meets everything chosen so
 * far. The result weaves exactly the potential sets the witness function
 * needs.
 */
IndexMap build_certified_prefix(const AdversaryResult& run, Nat max_len);

struct ViabilityAudit {
  Nat checked = 0;  // chain links whose domination premise held
  std::vector<std::string> violations;
};

/// Checks each chain link of an extracted witness function for viability
/// against opponent e, wherever f is dominated by the opponent's
/// convergence stages up to that link.
ViabilityAudit audit_viability(const WitnessFunction& wf, const AdversaryResult& run, Nat e);

}  // namespace fip
