#include "fip/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fip/adversary.hpp"
#include "fip/core.hpp"
#include "fip/family_io.hpp"
#include "fip/genericity.hpp"
#include "fip/oracle.hpp"
#include "fip/reductions.hpp"
#include "fip/solvers.hpp"

namespace fip {

namespace {

Nat arg_nat(const Scenario& s, const std::string& key, std::optional<Nat> fallback = {}) {
  auto it = s.args.find(key);
  if (it == s.args.end()) {
    if (fallback) return *fallback;
    throw InputError("scenario " + s.name + " lacks argument " + key);
  }
  return static_cast<Nat>(std::stoull(it->second));
}

const std::string& arg_text(const Scenario& s, const std::string& key) {
  auto it = s.args.find(key);
  if (it == s.args.end())
    throw InputError("scenario " + s.name + " lacks argument " + key);
  return it->second;
}

Family family_arg(const Scenario& s) { return parse_family_text(arg_text(s, "family_text")); }

Nat adequate_stages(const Family& family) {
  return std::max(family.universe_bound(), family.index_bound()) + 2;
}

std::string join_indices(const std::vector<Nat>& xs) {
  std::ostringstream out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) out << " ";
    out << xs[k];
  }
  return out.str();
}

// ---- operations -----------------------------------------------------------

ScenarioReport op_hat_eq1(const Scenario& s, bool bounded_variant) {
  ScenarioReport report;
  Family family = family_arg(s);
  Nat n = arg_nat(s, "n", 2);
  Nat stages = arg_nat(s, "stages", adequate_stages(family));
  HatTransform hat =
      bounded_variant ? hat_transform_bounded(family, n, stages) : hat_transform(family, n, stages);
  report.output_text = format_family(hat.target);
  auto failures = check_hat_law(family, hat.target, n, bounded_variant);
  if (failures.empty()) {
    report.pass = true;
    report.exit_code = 0;
    report.detail = "transform law holds on all index sets";
  } else {
    report.exit_code = 1;
    report.detail = "transform law fails on " + std::to_string(failures.size()) +
                    " index sets; first: {" + join_indices(failures.front()) + "}";
  }
  return report;
}

ScenarioReport op_pullback(const Scenario& s) {
  ScenarioReport report;
  Family family = family_arg(s);
  Nat n = arg_nat(s, "n", 2);
  HatTransform hat = hat_transform(family, n, adequate_stages(family));
  auto solutions = brute_force_maximal(hat.target, IntersectionProperty::f());
  Nat checked = 0;
  for (const auto& solution : solutions) {
    auto pulled = pull_back_solution(family, hat.target, solution, n);
    auto verdict = is_maximal(family, pulled, IntersectionProperty::dbar(n));
    if (verdict.outcome != MaximalityVerdict::Outcome::Maximal) {
      report.exit_code = 1;
      report.detail = "pull-back of {" + join_indices(solution) + "} is not maximal";
      return report;
    }
    ++checked;
  }
  report.pass = true;
  report.exit_code = 0;
  report.detail = std::to_string(checked) + " derived solutions pulled back maximal";
  return report;
}

ScenarioReport op_range_roundtrip(const Scenario& s) {
  ScenarioReport report;
  std::istringstream table_in(arg_text(s, "table_text"));
  FunctionTable table = parse_table(table_in);
  auto prop = IntersectionProperty::parse(arg_text(s, "prop"));
  Family family = encode_range(table);
  report.output_text = format_family(family);
  std::vector<Nat> range = table.range();
  Nat checked = 0;
  for (const auto& solution : brute_force_maximal(family, prop)) {
    if (prop.kind == IntersectionProperty::Kind::EmptyN) {
      auto decode = decode_range(family, solution, prop);
      std::vector<Nat> reunion = decode.decoded;
      reunion.insert(reunion.end(), decode.exceptions.begin(), decode.exceptions.end());
      std::sort(reunion.begin(), reunion.end());
      if (reunion != range || decode.exceptions.size() > prop.n - 1) {
        report.exit_code = 1;
        report.detail = "decode of {" + join_indices(solution) + "} missed the range";
        return report;
      }
    } else {
      bool lone_singleton = true;
      for (Nat j : solution)
        if (family.set(j).decided_in().size() > 1) lone_singleton = false;
      if (lone_singleton) {
        // degenerate marker-singleton solution: must be one non-range index
        if (solution.size() != 1 ||
            std::find(range.begin(), range.end(), solution[0]) != range.end()) {
          report.exit_code = 1;
          report.detail = "unexpected degenerate solution {" + join_indices(solution) + "}";
          return report;
        }
        continue;
      }
      auto decode = decode_range(family, solution, prop);
      if (decode.decoded != range) {
        report.exit_code = 1;
        report.detail = "decode of {" + join_indices(solution) + "} is {" +
                        join_indices(decode.decoded) + "}, range is {" + join_indices(range) +
                        "}";
        return report;
      }
    }
    ++checked;
  }
  report.pass = true;
  report.exit_code = 0;
  report.detail = std::to_string(checked) + " solutions decoded to the range";
  return report;
}

ScenarioReport op_domination_escape(const Scenario& s) {
  ScenarioReport report;
  Family family = family_arg(s);
  Nat steps = arg_nat(s, "steps", 2 * family.index_bound() + 2);
  DominationOracle oracle;
  for (Nat t = 0; t < steps; ++t) oracle.values.push_back(compute_g(family, t) + 1);
  auto result = solve_hyperimmune(family, oracle, steps);
  report.output_text = "J: " + join_indices(result.j.entries) + "\n";
  if (result.maximality.outcome == MaximalityVerdict::Outcome::Maximal) {
    report.pass = true;
    report.exit_code = 0;
    report.detail = "escaping oracle reached a maximal subfamily";
  } else {
    report.exit_code = 1;
    report.detail = "output is not maximal under the escaping oracle";
  }
  return report;
}

ScenarioReport op_permitting_invariant(const Scenario& s) {
  ScenarioReport report;
  Family family = family_arg(s);
  std::istringstream ce_in(arg_text(s, "ce_text"));
  CeEnumeration ce = parse_ce(ce_in);
  Nat stages = arg_nat(s, "stages", ce.stages() - 1);
  auto result = solve_permitting(family, ce, stages);
  report.output_text = "J: " + join_indices(result.j.entries) + "\n";
  report.trace_text = result.state.trace.serialize();
  auto violations = audit_permitting(result, ce);
  if (violations.empty()) {
    report.pass = true;
    report.exit_code = 0;
    report.detail = "permitting rule and copy invariants hold on the trace";
  } else {
    report.exit_code = 1;
    report.detail = violations.front();
  }
  return report;
}

ScenarioReport op_adversary_invariants(const Scenario& s) {
  ScenarioReport report;
  Nat stages = arg_nat(s, "stages", 120);
  Nat max_len = arg_nat(s, "max_sigma_len", 4);
  StrategyList suite = builtin_strategy_suite();
  auto run = run_full(suite, AdversaryParams{stages, max_len});
  report.trace_text = run.trace.serialize();
  std::vector<std::string> violations;
  for (auto& v : audit_freshness(run)) violations.push_back(v);
  for (auto& v : audit_type2_discipline(run)) violations.push_back(v);
  for (auto& v : audit_trap_redefinitions(run)) violations.push_back(v);
  for (auto& v : audit_totality(run)) violations.push_back(v);
  for (Nat e = 0; e < suite.size(); ++e)
    for (auto& v : audit_trap_evasion(run, e)) violations.push_back(v);
  if (violations.empty()) {
    report.pass = true;
    report.exit_code = 0;
    report.detail = "freshness, labels, traps, totality and trap evasion all clean";
  } else {
    report.exit_code = 1;
    report.detail = violations.front();
  }
  return report;
}

ScenarioReport op_warmup_audit(const Scenario& s) {
  ScenarioReport report;
  Nat stages = arg_nat(s, "stages", 60);
  std::istringstream strategies_in("strategies v1\ngreedy delay=0\ngreedy delay=1\n");
  StrategyList list = parse_strategies(strategies_in);
  auto run = run_warmup(list, AdversaryParams{stages, 4});
  report.trace_text = run.trace.serialize();
  std::vector<std::string> violations;
  for (auto& v : audit_freshness(run)) violations.push_back(v);
  for (auto& v : audit_warmup_trap_disjointness(run)) violations.push_back(v);
  for (auto& v : audit_totality(run)) violations.push_back(v);
  bool progressed = !run.progressive_stages[0].empty();
  if (violations.empty() && progressed) {
    report.pass = true;
    report.exit_code = 0;
    report.detail = "trap stayed one step behind through every progressive stage";
  } else {
    report.exit_code = 1;
    report.detail = violations.empty() ? "no progressive stage reached" : violations.front();
  }
  return report;
}

ScenarioReport op_generic_roundtrip(const Scenario& s) {
  ScenarioReport report;
  Family family = family_arg(s);
  Coding coding = Coding::for_family(family);
  std::vector<DenseSetQuery> targets;
  for (Nat i = 0; i < family.index_bound(); ++i)
    targets.push_back({i, family.universe_bound()});
  auto built = build_generic(family, coding, targets);
  auto extraction = extract_subfamily(built.g, family, coding);
  report.output_text = "J: " + join_indices(extraction.j.entries) + "\n";
  if (extraction.maximality.outcome == MaximalityVerdict::Outcome::Maximal &&
      extraction.met_targets.size() == family.index_bound()) {
    report.pass = true;
    report.exit_code = 0;
    report.detail = "generic string met every dense set and extracted a maximal subfamily";
  } else {
    report.exit_code = 1;
    report.detail = "extraction failed maximality or missed a dense set";
  }
  return report;
}

}  // namespace

const std::map<std::string, std::string>& scenario_registry() {
  static const std::map<std::string, std::string> registry{
      {"hat-eq1", "property"},
      {"hat-eq1-bounded", "property"},
      {"pullback", "maximality"},
      {"range-roundtrip", "round-trip"},
      {"domination-escape", "maximality"},
      {"permitting-invariant", "trace-invariant"},
      {"adversary-invariants", "trace-invariant"},
      {"warmup-audit", "trace-invariant"},
      {"generic-roundtrip", "maximality"},
  };
  return registry;
}

ScenarioReport run_scenario(const Scenario& scenario) {
  ScenarioReport report;
  report.name = scenario.name;
  try {
    auto it = scenario_registry().find(scenario.operation);
    if (it == scenario_registry().end())
      throw InputError("unknown scenario operation: " + scenario.operation);
    if (!scenario.expect.empty() && scenario.expect != it->second)
      throw InputError("operation " + scenario.operation + " checks a '" + it->second +
                       "' oracle, not '" + scenario.expect + "'");
    ScenarioReport inner;
    if (scenario.operation == "hat-eq1") inner = op_hat_eq1(scenario, false);
    else if (scenario.operation == "hat-eq1-bounded") inner = op_hat_eq1(scenario, true);
    else if (scenario.operation == "pullback") inner = op_pullback(scenario);
    else if (scenario.operation == "range-roundtrip") inner = op_range_roundtrip(scenario);
    else if (scenario.operation == "domination-escape") inner = op_domination_escape(scenario);
    else if (scenario.operation == "permitting-invariant") inner = op_permitting_invariant(scenario);
    else if (scenario.operation == "adversary-invariants") inner = op_adversary_invariants(scenario);
    else if (scenario.operation == "warmup-audit") inner = op_warmup_audit(scenario);
    else if (scenario.operation == "generic-roundtrip") inner = op_generic_roundtrip(scenario);
    inner.name = scenario.name;
    return inner;
  } catch (const TruncationError& err) {
    report.exit_code = 3;
    report.detail = err.what();
  } catch (const InputError& err) {
    report.exit_code = 2;
    report.detail = err.what();
  }
  return report;
}

Scenario parse_scenario(std::istream& in) {
  Scenario scenario;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    std::istringstream iss(line);
    std::string tok;
    if (!(iss >> tok)) continue;
    if (tok[0] == '#') continue;
    if (!have_header) {
      std::string version, name;
      iss >> version >> name;
      if (tok != "scenario" || version != "v1" || name.rfind("name=", 0) != 0)
        throw InputError("scenario file must start with 'scenario v1 name=<word>'");
      scenario.name = name.substr(5);
      have_header = true;
      continue;
    }
    if (tok == "op") {
      iss >> scenario.operation;
    } else if (tok == "arg") {
      std::string key, value;
      iss >> key >> value;
      if (key.empty() || value.empty()) throw InputError("malformed arg line: " + line);
      scenario.args[key] = value;
    } else if (tok == "file") {
      std::string key, path;
      iss >> key >> path;
      std::ifstream file(path);
      if (!file) throw InputError("scenario references missing file: " + path);
      std::ostringstream content;
      content << file.rdbuf();
      scenario.args[key] = content.str();
    } else if (tok == "expect") {
      iss >> scenario.expect;
    } else {
      throw InputError("unrecognized scenario line: " + line);
    }
  }
  if (scenario.operation.empty()) throw InputError("scenario lists no operation");
  return scenario;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file: " + path);
  return parse_scenario(in);
}

std::vector<std::string> builtin_scenario_names() {
  return {"hat-eq1",        "hat-eq1-bounded",      "pullback",
          "range-roundtrip", "range-roundtrip-d2",  "domination-escape",
          "permitting-invariant", "adversary-invariants", "warmup-audit",
          "generic-roundtrip"};
}

Scenario builtin_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  auto random_family_text = [](Nat seed, Nat index_bound, Nat universe) {
    std::ostringstream out;
    out << "family v1 I=" << index_bound << " U=" << universe << "\ngen random seed=" << seed
        << " density=400\n";
    return out.str();
  };
  if (name == "hat-eq1") {
    s.operation = "hat-eq1";
    s.args["family_text"] = random_family_text(11, 4, 21);
    s.args["n"] = "2";
  } else if (name == "hat-eq1-bounded") {
    s.operation = "hat-eq1-bounded";
    s.args["family_text"] = random_family_text(12, 5, 23);
    s.args["n"] = "2";
  } else if (name == "pullback") {
    s.operation = "pullback";
    s.args["family_text"] = random_family_text(22, 5, 24);
    s.args["n"] = "2";
  } else if (name == "range-roundtrip") {
    s.operation = "range-roundtrip";
    s.args["table_text"] = "table v1 D=4\nvalues: 0 4 2 4\n";
    s.args["prop"] = "F";
  } else if (name == "range-roundtrip-d2") {
    s.operation = "range-roundtrip";
    s.args["table_text"] = "table v1 D=5\nvalues: 3 1 3 0 1\n";
    s.args["prop"] = "D2";
  } else if (name == "domination-escape") {
    s.operation = "domination-escape";
    s.args["family_text"] = random_family_text(33, 5, 24);
  } else if (name == "permitting-invariant") {
    s.operation = "permitting-invariant";
    s.args["family_text"] = "family v1 I=5 U=31\ngen common w=1\n";
    std::ostringstream ce;
    ce << "ce v1 S=30\n";
    for (Nat t = 0; t < 30; ++t) ce << "w " << t << ": " << t << "\n";
    s.args["ce_text"] = ce.str();
    s.args["stages"] = "29";
  } else if (name == "adversary-invariants") {
    s.operation = "adversary-invariants";
    s.args["stages"] = "120";
  } else if (name == "warmup-audit") {
    s.operation = "warmup-audit";
    s.args["stages"] = "60";
  } else if (name == "generic-roundtrip") {
    s.operation = "generic-roundtrip";
    s.args["family_text"] = random_family_text(44, 5, 20);
  } else {
    throw InputError("unknown builtin scenario: " + name);
  }
  return s;
}

ReplayResult replay(const Trace& trace) {
  ReplayResult result;
  result.complete = trace.complete();
  if (trace.run_kind() == "warmup" || trace.run_kind() == "full") {
    ConstructionFamily family;
    for (const TraceEvent& ev : trace.events()) {
      if (ev.kind == "intersect") {
        Nat n = ev.nat_field("n");
        family.put_in(ev.nat_field("i"), n, ev.stage);
        family.put_in(ev.nat_field("j"), n, ev.stage);
      } else if (ev.kind == "totalize") {
        family.raise_frontier(ev.nat_field("n"), ev.stage);
      }
    }
    result.family = std::move(family);
  } else if (trace.run_kind() == "permitting") {
    std::vector<std::vector<Nat>> history;
    std::vector<Nat> m;
    Nat cur_stage = 0;
    auto flush_through = [&](Nat stage) {
      while (cur_stage < stage) {
        history.push_back(m);
        ++cur_stage;
      }
    };
    for (const TraceEvent& ev : trace.events()) {
      flush_through(ev.stage);
      if (ev.kind == "permit") {
        m.insert(std::lower_bound(m.begin(), m.end(), ev.nat_field("code")),
                 ev.nat_field("code"));
      } else if (ev.kind == "remove") {
        Nat code = ev.nat_field("code");
        m.erase(std::remove(m.begin(), m.end(), code), m.end());
      } else if (ev.kind != "stay") {
        throw InputError("unexpected event in permitting trace: " + ev.kind);
      }
    }
    history.push_back(m);
    result.m_history = std::move(history);
  } else {
    throw InputError("replay does not understand run kind '" + trace.run_kind() + "'");
  }
  return result;
}

std::vector<std::vector<Nat>> check_hat_law(const Family& source, const Family& derived, Nat n,
                                            bool exactly_n_plus_1) {
  if (source.index_bound() > 16)
    throw InputError("transform law check guard exceeded");
  std::vector<std::vector<Nat>> failures;
  std::vector<Nat> subset;
  auto check = [&](const std::vector<Nat>& f) {
    bool lhs = least_common_element(derived, f).has_value();
    bool rhs = true;
    // every n-subset of f witnessed in the source
    std::vector<std::size_t> pick(n);
    for (std::size_t i = 0; i < n; ++i) pick[i] = i;
    std::vector<Nat> g(n);
    bool done = f.size() < n;
    while (!done && rhs) {
      for (std::size_t i = 0; i < n; ++i) g[i] = f[pick[i]];
      if (!least_common_element(source, g)) rhs = false;
      std::size_t i = n;
      bool advanced = false;
      while (i > 0) {
        --i;
        if (pick[i] != i + f.size() - n) {
          ++pick[i];
          for (std::size_t j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
          advanced = true;
          break;
        }
      }
      if (!advanced) done = true;
    }
    if (lhs != rhs) failures.push_back(f);
  };
  auto rec = [&](auto&& self, Nat next) -> void {
    bool size_ok = exactly_n_plus_1 ? subset.size() == n + 1 : subset.size() >= n;
    if (size_ok) check(subset);
    if (exactly_n_plus_1 && subset.size() >= n + 1) return;
    for (Nat i = next; i < source.index_bound(); ++i) {
      subset.push_back(i);
      self(self, i + 1);
      subset.pop_back();
    }
  };
  rec(rec, 0);
  return failures;
}

}  // namespace fip
