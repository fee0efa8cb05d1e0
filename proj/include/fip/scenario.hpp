#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fip/construction.hpp"
#include "fip/family.hpp"
#include "fip/trace.hpp"

namespace fip {

/**
 * A named, self-contained run of one operation plus its oracle check.
 * Inputs are inline key-value arguments (file contents may be inlined
 * under *_text keys); operations and their oracles live in a registry.
 */
struct Scenario {
  std::string name;
  std::string operation;
  std::map<std::string, std::string> args;
  std::string expect;  // optional oracle name; must match the registry
};

Scenario parse_scenario(std::istream& in);
Scenario parse_scenario_file(const std::string& path);

struct ScenarioReport {
  std::string name;
  bool pass = false;
  /// 0 pass, 1 oracle failure, 2 input error, 3 undecided at truncation.
  int exit_code = 2;
  std::string detail;
  std::string output_text;  // primary artifact (family file, index map, ...)
  std::string trace_text;   // trace, for operations that produce one
};

/// Executes the scenario: parse inputs, run the operation, run the oracle,
/// report. Parse failures and oracle mismatches carry distinct exit codes.
ScenarioReport run_scenario(const Scenario& scenario);

/// Operation name -> oracle category it checks ("property", "maximality",
/// "round-trip", "trace-invariant").
const std::map<std::string, std::string>& scenario_registry();

std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(const std::string& name);

/// A replayed trace: which artifact it reconstructs depends on the run
/// kind recorded in the header.
struct ReplayResult {
  bool complete = false;
  std::optional<ConstructionFamily> family;               // warmup / full runs
  std::optional<std::vector<std::vector<Nat>>> m_history; // permitting runs
};

/// Reapplies a trace's events. For construction runs the result equals
/// the original run's family bit for bit; an incomplete trace yields the
/// partial state, flagged.
ReplayResult replay(const Trace& trace);

/**
 * The transform law checker used as the acceptance oracle: over every
 * index set F of size >= n (or exactly n+1 in the bounded variant), the
 * derived sets' intersection is nonempty exactly when all n-subsets of F
 * intersect in the source. Returns the failing sets.
 */
std::vector<std::vector<Nat>> check_hat_law(const Family& source, const Family& derived, Nat n,
                                            bool exactly_n_plus_1);

}  // namespace fip
