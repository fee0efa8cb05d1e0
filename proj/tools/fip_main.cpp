// fip: workbench for finite intersection properties of set families —
// family encodings, reduction transforms, oracle-driven maximal-subfamily
// solvers, stage constructions, and the brute-force oracles that check
// them. Exit codes: 0 pass, 1 oracle/postcondition failure, 2 input
// error, 3 undecided at the truncation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fip/adversary.hpp"
#include "fip/core.hpp"
#include "fip/family_io.hpp"
#include "fip/genericity.hpp"
#include "fip/oracle.hpp"
#include "fip/reductions.hpp"
#include "fip/scenario.hpp"
#include "fip/solvers.hpp"

using namespace fip;

namespace {

constexpr int kPass = 0;
constexpr int kOracleFailure = 1;
constexpr int kInputError = 2;
constexpr int kUndecided = 3;

std::optional<Nat> env_nat(const char* name) {
  const char* value = std::getenv(name);
  if (!value || !*value) return std::nullopt;
  return static_cast<Nat>(std::stoull(value));
}

std::vector<Nat> parse_index_list(const std::string& text) {
  std::vector<Nat> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(static_cast<Nat>(std::stoull(cur)));
      cur.clear();
    } else if (c >= '0' && c <= '9') {
      cur += c;
    } else {
      throw InputError("bad index list: " + text);
    }
  }
  return out;
}

std::string trace_json_lines(const Trace& trace) {
  std::ostringstream out;
  for (const TraceEvent& ev : trace.events()) {
    nlohmann::ordered_json row;
    row["stage"] = ev.stage;
    if (ev.substage) row["substage"] = *ev.substage;
    row["event"] = ev.kind;
    for (const auto& [k, v] : ev.payload) row[k] = v;
    out << row.dump() << "\n";
  }
  return out.str();
}

void write_trace(const Trace& trace, const std::string& path, const std::string& format) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw InputError("cannot write trace file: " + path);
  out << (format == "json-lines" ? trace_json_lines(trace) : trace.serialize());
}

void print_certs(const std::vector<WitnessCertificate>& certs) {
  for (const auto& cert : certs) {
    std::cout << "cert {";
    for (std::size_t k = 0; k < cert.indices.size(); ++k)
      std::cout << (k ? " " : "") << cert.indices[k];
    std::cout << "} witness=" << cert.witness << "\n";
  }
}

void print_index_map(const IndexMap& j) {
  std::cout << "J:";
  for (Nat x : j.entries) std::cout << " " << x;
  std::cout << "\n";
}

std::string verdict_name(PropertyVerdict::Outcome outcome) {
  switch (outcome) {
    case PropertyVerdict::Outcome::Holds: return "holds";
    case PropertyVerdict::Outcome::Fails: return "fails";
    case PropertyVerdict::Outcome::Undecided: return "undecided";
  }
  return "?";
}

struct Options {
  std::string trace_path;
  std::string format = "text";
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite intersection property workbench"};
  app.require_subcommand(1);
  Options opts;
  app.add_option("--trace", opts.trace_path, "write the run's trace to this path");
  app.add_option("--format", opts.format, "trace format: text or json-lines")
      ->check(CLI::IsMember({"text", "json-lines"}));

  int exit_code = kPass;

  // ---- check ----
  std::string check_family, check_prop = "F";
  auto* check = app.add_subcommand("check", "check an intersection property on a family file");
  check->add_option("family", check_family)->required();
  check->add_option("--prop", check_prop, "F, D<n> or Dbar<n>");
  check->callback([&] {
    Family family = parse_family_file(check_family);
    auto verdict = check_property(family, IntersectionProperty::parse(check_prop));
    std::cout << "property " << check_prop << " " << verdict_name(verdict.outcome)
              << " (I=" << family.index_bound() << " U=" << family.universe_bound() << ")\n";
    if (verdict.outcome == PropertyVerdict::Outcome::Fails && verdict.counterexample) {
      std::cout << "counterexample {";
      for (std::size_t k = 0; k < verdict.counterexample->size(); ++k)
        std::cout << (k ? " " : "") << (*verdict.counterexample)[k];
      std::cout << "}";
      if (verdict.counterexample_witness)
        std::cout << " common element " << *verdict.counterexample_witness;
      std::cout << "\n";
      exit_code = kOracleFailure;
    } else if (verdict.outcome == PropertyVerdict::Outcome::Undecided) {
      std::cout << "undecided at set " << verdict.undecided_at->first << ", element "
                << verdict.undecided_at->second << "\n";
      exit_code = kUndecided;
    } else {
      print_certs(verdict.certificates);
    }
  });

  // ---- maximal ----
  std::string max_family, max_prop = "F", max_chosen, max_candidates;
  auto* maximal = app.add_subcommand("maximal", "check maximality of a chosen subfamily");
  maximal->add_option("family", max_family)->required();
  maximal->add_option("--prop", max_prop);
  maximal->add_option("--chosen", max_chosen)->required();
  maximal->add_option("--candidates", max_candidates, "restrict extension candidates");
  maximal->callback([&] {
    Family family = parse_family_file(max_family);
    auto chosen = parse_index_list(max_chosen);
    std::vector<Nat> candidates;
    if (!max_candidates.empty()) candidates = parse_index_list(max_candidates);
    auto verdict = is_maximal(family, chosen, IntersectionProperty::parse(max_prop), candidates);
    switch (verdict.outcome) {
      case MaximalityVerdict::Outcome::Maximal:
        std::cout << "maximal\n";
        break;
      case MaximalityVerdict::Outcome::Extendable:
        std::cout << "extendable by index " << *verdict.extending_index << "\n";
        exit_code = kOracleFailure;
        break;
      case MaximalityVerdict::Outcome::ChosenInvalid:
        std::cout << "chosen subfamily fails " << max_prop << "\n";
        exit_code = kInputError;
        break;
      case MaximalityVerdict::Outcome::Undecided:
        std::cout << "undecided at this truncation\n";
        exit_code = kUndecided;
        break;
    }
  });

  // ---- index-of ----
  std::string idx_family;
  Nat idx_set = 0;
  auto* index_of = app.add_subcommand("index-of", "recover a marker-convention set's index");
  index_of->add_option("family", idx_family)->required();
  index_of->add_option("--set", idx_set, "position of the set in the file")->required();
  index_of->callback([&] {
    Family family = parse_family_file(idx_family);
    auto rec = subfamily_index_of(family.set(idx_set));
    switch (rec.status) {
      case IndexRecovery::Status::Ok:
        std::cout << "index " << rec.index << "\n";
        break;
      case IndexRecovery::Status::MarkerUndecided:
        std::cout << rec.detail << "\n";
        exit_code = kUndecided;
        break;
      case IndexRecovery::Status::Malformed:
        std::cout << rec.detail << "\n";
        exit_code = kInputError;
        break;
    }
  });

  // ---- brute-force ----
  std::string bf_family, bf_prop = "F";
  auto* brute = app.add_subcommand("brute-force", "enumerate all maximal solutions");
  brute->add_option("family", bf_family)->required();
  brute->add_option("--prop", bf_prop);
  brute->callback([&] {
    Family family = parse_family_file(bf_family);
    auto solutions = brute_force_maximal(family, IntersectionProperty::parse(bf_prop));
    for (const auto& solution : solutions) {
      std::cout << "solution {";
      for (std::size_t k = 0; k < solution.size(); ++k)
        std::cout << (k ? " " : "") << solution[k];
      std::cout << "}\n";
    }
    std::cout << solutions.size() << " maximal solutions\n";
  });

  // ---- hat-transform ----
  std::string hat_family;
  Nat hat_n = 2, hat_stages = 0;
  bool hat_bounded = false;
  auto* hat = app.add_subcommand("hat-transform",
                                 "derive the family whose full intersections mirror "
                                 "n-wise intersections of the source");
  hat->add_option("family", hat_family)->required();
  hat->add_option("--n", hat_n);
  hat->add_option("--stages", hat_stages, "stage budget (default: enough for the truncation)");
  hat->add_flag("--bounded", hat_bounded, "trigger only on sets of size exactly n+1");
  hat->callback([&] {
    Family family = parse_family_file(hat_family);
    Nat stages = hat_stages;
    if (stages == 0) {
      auto env = env_nat("FIP_STAGE_BOUND");
      stages = env ? *env
                   : std::max(family.universe_bound(), family.index_bound()) + 2;
    }
    HatTransform result = hat_bounded ? hat_transform_bounded(family, hat_n, stages)
                                      : hat_transform(family, hat_n, stages);
    std::cout << format_family(result.target);
    std::cout << "# verdict: stages=" << result.stages_run
              << " next_odd=" << result.next_odd << " unwitnessed=" << result.unwitnessed.size()
              << "\n";
    for (const auto& f : result.unwitnessed) {
      std::cout << "# unwitnessed {";
      for (std::size_t k = 0; k < f.size(); ++k) std::cout << (k ? " " : "") << f[k];
      std::cout << "}\n";
    }
    if (!result.unwitnessed.empty()) exit_code = kUndecided;
  });

  // ---- encode-range ----
  std::string enc_table;
  Nat enc_index_bound = 0, enc_universe = 0;
  auto* encode = app.add_subcommand("encode-range", "family encoding a finite function's range");
  encode->add_option("--table", enc_table)->required();
  encode->add_option("--index-bound", enc_index_bound);
  encode->add_option("--universe-bound", enc_universe);
  encode->callback([&] {
    FunctionTable table = parse_table_file(enc_table);
    Nat index_bound = enc_index_bound;
    Nat universe = enc_universe;
    if (index_bound == 0)
      if (auto env = env_nat("FIP_INDEX_BOUND")) index_bound = *env;
    if (universe == 0)
      if (auto env = env_nat("FIP_UNIVERSE_BOUND")) universe = *env;
    Family family = encode_range(table, index_bound, universe);
    std::cout << format_family(family);
  });

  // ---- decode-range ----
  std::string dec_family, dec_prop = "F", dec_chosen;
  auto* decode = app.add_subcommand("decode-range", "read the range off a maximal solution");
  decode->add_option("family", dec_family)->required();
  decode->add_option("--prop", dec_prop);
  decode->add_option("--chosen", dec_chosen)->required();
  decode->callback([&] {
    Family family = parse_family_file(dec_family);
    auto chosen = parse_index_list(dec_chosen);
    auto result = decode_range(family, chosen, IntersectionProperty::parse(dec_prop));
    std::cout << "decoded:";
    for (Nat i : result.decoded) std::cout << " " << i;
    std::cout << "\n";
    if (!result.exceptions.empty()) {
      std::cout << "exceptions:";
      for (Nat i : result.exceptions) std::cout << " " << i;
      std::cout << "\n";
    }
  });

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "maximal-subfamily solvers");
  solve->require_subcommand(1);
  std::string solve_family, solve_oracle, solve_ce, solve_requirements;
  Nat solve_budget = 0, solve_stages = 0;

  auto* greedy = solve->add_subcommand("greedy", "forcing-style greedy solver");
  greedy->add_option("--family", solve_family)->required();
  greedy->add_option("--budget", solve_budget);
  greedy->add_option("--requirements", solve_requirements, "indices to try to include");
  greedy->callback([&] {
    Family family = parse_family_file(solve_family);
    std::vector<Nat> requirements;
    if (solve_requirements.empty()) {
      for (Nat i = 0; i < family.index_bound(); ++i) requirements.push_back(i);
    } else {
      requirements = parse_index_list(solve_requirements);
    }
    Nat budget = solve_budget ? solve_budget : requirements.size();
    auto result = solve_greedy(family, requirements, budget);
    print_index_map(result.j);
    print_certs(result.certs);
    if (!result.unreachable.empty()) {
      std::cout << "unreachable:";
      for (Nat e : result.unreachable) std::cout << " " << e;
      std::cout << "\n";
    }
    if (result.budget_exhausted) {
      std::cout << "partial: budget exhausted with";
      for (Nat e : result.unsettled) std::cout << " " << e;
      std::cout << " unsettled\n";
      exit_code = kUndecided;
    }
  });

  auto* hyper = solve->add_subcommand("hyperimmune", "domination-guided solver");
  hyper->add_option("--family", solve_family)->required();
  hyper->add_option("--oracle", solve_oracle, "function table file; default: escape rate g+1");
  hyper->add_option("--stages", solve_stages);
  hyper->callback([&] {
    Family family = parse_family_file(solve_family);
    Nat steps = solve_stages ? solve_stages : 2 * family.index_bound() + 2;
    DominationOracle oracle;
    if (solve_oracle.empty()) {
      for (Nat t = 0; t < steps; ++t) oracle.values.push_back(compute_g(family, t) + 1);
      std::cout << "# oracle: g+1, truncation-exact\n";
    } else {
      oracle.values = parse_table_file(solve_oracle).values;
    }
    auto result = solve_hyperimmune(family, oracle, steps);
    print_index_map(result.j);
    print_certs(result.prefix_certs);
    bool maximal = result.maximality.outcome == MaximalityVerdict::Outcome::Maximal;
    std::cout << (maximal ? "maximal on the truncation\n" : "flagged non-maximal\n");
    if (!maximal) exit_code = kOracleFailure;
  });

  auto* permit = solve->add_subcommand("permitting", "c.e.-permitting solver");
  permit->add_option("--family", solve_family)->required();
  permit->add_option("--ce", solve_ce)->required();
  permit->add_option("--stages", solve_stages);
  permit->callback([&] {
    Family family = parse_family_file(solve_family);
    CeEnumeration ce = parse_ce_file(solve_ce);
    Nat stages = solve_stages ? solve_stages : ce.stages() - 1;
    auto result = solve_permitting(family, ce, stages);
    print_index_map(result.j);
    print_certs(result.state.stage_certs);
    write_trace(result.state.trace, opts.trace_path, opts.format);
    auto violations = audit_permitting(result, ce);
    if (!violations.empty()) {
      for (const auto& v : violations) std::cout << "violation: " << v << "\n";
      exit_code = kOracleFailure;
    }
  });

  // ---- compute-g ----
  std::string g_family;
  Nat g_s = 0;
  auto* gcmd = app.add_subcommand("compute-g", "least bound covering every witnessed "
                                               "intersection within {0..s}");
  gcmd->add_option("--family", g_family)->required();
  gcmd->add_option("--s", g_s)->required();
  gcmd->callback([&] {
    Family family = parse_family_file(g_family);
    std::cout << "g(" << g_s << ") = " << compute_g(family, g_s) << " (truncation-exact)\n";
  });

  // ---- adversary ----
  auto* adversary = app.add_subcommand("adversary", "stage constructions against opponents");
  adversary->require_subcommand(1);
  std::string adv_strategies, adv_out_family;
  Nat adv_stages = 0, adv_max_len = 4;

  auto add_adv = [&](const char* name, const char* help, bool full) {
    auto* cmd = adversary->add_subcommand(name, help);
    cmd->add_option("--strategies", adv_strategies,
                    "strategy spec file; default: the builtin ten-opponent suite");
    cmd->add_option("--stages", adv_stages)->required();
    cmd->add_option("--max-sigma-len", adv_max_len);
    cmd->add_option("--out-family", adv_out_family, "write the decided truncation here");
    cmd->callback([&, full] {
      StrategyList strategies = adv_strategies.empty()
                                    ? builtin_strategy_suite()
                                    : parse_strategies_file(adv_strategies);
      AdversaryParams params{adv_stages, adv_max_len};
      AdversaryResult run =
          full ? run_full(strategies, params) : run_warmup(strategies, params);
      write_trace(run.trace, opts.trace_path, opts.format);
      std::cout << "stages=" << run.stages << " frontier=" << run.family.frontier()
                << " high_water=" << run.family.high_water() << "\n";
      for (Nat e = 0; e < run.strategy_names.size(); ++e) {
        std::cout << "opponent " << e << " (" << run.strategy_names[e]
                  << "): released=" << run.released[e].size()
                  << " progressive=" << run.progressive_stages[e].size()
                  << (run.respects_convention(e) ? "" : " [computations withheld]") << "\n";
      }
      std::vector<std::string> violations;
      for (auto& v : audit_freshness(run)) violations.push_back(v);
      for (auto& v : audit_totality(run)) violations.push_back(v);
      if (full) {
        for (auto& v : audit_type2_discipline(run)) violations.push_back(v);
        for (auto& v : audit_trap_redefinitions(run)) violations.push_back(v);
      } else {
        for (auto& v : audit_warmup_trap_disjointness(run)) violations.push_back(v);
      }
      for (const auto& v : violations) std::cout << "violation: " << v << "\n";
      if (!violations.empty()) exit_code = kOracleFailure;
      if (!adv_out_family.empty()) {
        Nat index_bound = std::min<Nat>(run.family.high_water() + 1, 4096);
        Family truncation = run.family.materialize(index_bound, run.family.frontier());
        write_family_file(adv_out_family, truncation, /*compact=*/true);
      }
    });
  };
  add_adv("warmup", "the motivating diagonalization", false);
  add_adv("full", "the five-step construction over bounded strings", true);

  // ---- generic ----
  auto* generic = app.add_subcommand("generic", "dense-set genericity reduction");
  generic->require_subcommand(1);
  std::string gen_family, gen_targets, gen_bits;
  Nat gen_budget = 0;

  auto* gen_build = generic->add_subcommand("build", "build a finite generic string");
  gen_build->add_option("--family", gen_family)->required();
  gen_build->add_option("--targets", gen_targets, "dense-set indices; default: all");
  gen_build->add_option("--budget", gen_budget, "witness bound for the emptiness clause");
  gen_build->callback([&] {
    Family family = parse_family_file(gen_family);
    Nat budget = gen_budget;
    if (budget == 0) {
      auto env = env_nat("FIP_UNIVERSE_BOUND");
      budget = env ? *env : family.universe_bound();
    }
    std::vector<DenseSetQuery> targets;
    if (gen_targets.empty()) {
      for (Nat i = 0; i < family.index_bound(); ++i) targets.push_back({i, budget});
    } else {
      for (Nat i : parse_index_list(gen_targets)) targets.push_back({i, budget});
    }
    Coding coding = Coding::for_family(family);
    auto result = build_generic(family, coding, targets);
    std::cout << "bits v1 len=" << result.g.length << "\nones:";
    for (Nat n : result.g.ones) std::cout << " " << n;
    std::cout << "\n";
    for (const auto& [target, prefix] : result.met_at)
      std::cout << "# met target " << target << " at prefix " << prefix << "\n";
  });

  auto* gen_extract = generic->add_subcommand("extract", "extract the subfamily of a string");
  gen_extract->add_option("--g", gen_bits)->required();
  gen_extract->add_option("--family", gen_family)->required();
  gen_extract->callback([&] {
    Family family = parse_family_file(gen_family);
    std::ifstream in(gen_bits);
    if (!in) throw InputError("cannot open bitstring file: " + gen_bits);
    std::string header, ones_line;
    std::getline(in, header);
    std::getline(in, ones_line);
    std::istringstream head(header);
    std::string magic, version, len_field;
    head >> magic >> version >> len_field;
    if (magic != "bits" || version != "v1" || len_field.rfind("len=", 0) != 0)
      throw InputError("bitstring file must start with 'bits v1 len=<n>'");
    BitString g;
    g.length = static_cast<Nat>(std::stoull(len_field.substr(4)));
    std::istringstream ones(ones_line);
    std::string tok;
    ones >> tok;  // "ones:"
    Nat n = 0;
    while (ones >> n) g.ones.push_back(n);
    Coding coding = Coding::for_family(family);
    auto extraction = extract_subfamily(g, family, coding);
    print_index_map(extraction.j);
    print_certs(extraction.prefix_certs);
    for (const auto& tau : extraction.tau_chain) {
      std::cout << "tau:";
      for (Nat x : tau) std::cout << " " << x;
      std::cout << "\n";
    }
    std::cout << "met targets:";
    for (Nat i : extraction.met_targets) std::cout << " " << i;
    std::cout << "\n";
    std::cout << (extraction.maximality.outcome == MaximalityVerdict::Outcome::Maximal
                      ? "maximal among met targets\n"
                      : "not maximal among met targets\n");
    if (extraction.maximality.outcome != MaximalityVerdict::Outcome::Maximal)
      exit_code = kOracleFailure;
  });

  // ---- scenario ----
  std::string scn_file, scn_builtin;
  bool scn_list = false;
  auto* scenario_cmd = app.add_subcommand("scenario", "run a scenario with its oracle");
  scenario_cmd->add_option("file", scn_file, "scenario file");
  scenario_cmd->add_option("--builtin", scn_builtin, "run a builtin golden scenario");
  scenario_cmd->add_flag("--list-builtin", scn_list);
  scenario_cmd->callback([&] {
    if (scn_list) {
      for (const auto& name : builtin_scenario_names()) std::cout << name << "\n";
      return;
    }
    Scenario scenario;
    if (!scn_builtin.empty())
      scenario = builtin_scenario(scn_builtin);
    else if (!scn_file.empty())
      scenario = parse_scenario_file(scn_file);
    else
      throw InputError("scenario needs a file or --builtin");
    auto report = run_scenario(scenario);
    std::cout << "[" << (report.pass ? "PASS" : "FAIL") << "] " << report.name << ": "
              << report.detail << "\n";
    if (!report.trace_text.empty() && !opts.trace_path.empty()) {
      std::ofstream out(opts.trace_path);
      if (opts.format == "json-lines") {
        std::istringstream trace_in(report.trace_text);
        out << trace_json_lines(Trace::parse(trace_in));
      } else {
        out << report.trace_text;
      }
    }
    exit_code = report.exit_code;
  });

  // ---- replay ----
  std::string replay_file, replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "reconstruct a run from its trace");
  replay_cmd->add_option("trace", replay_file)->required();
  replay_cmd->add_option("--out-family", replay_out);
  replay_cmd->callback([&] {
    Trace trace = Trace::parse_file(replay_file);
    auto result = replay(trace);
    if (!result.complete) {
      std::cout << "trace is truncated: partial reconstruction\n";
      exit_code = kUndecided;
    }
    if (result.family) {
      std::cout << "reconstructed construction family: frontier=" << result.family->frontier()
                << " touched=" << result.family->touched_indices().size() << "\n";
      if (!replay_out.empty()) {
        Nat index_bound = std::min<Nat>(result.family->high_water() + 1, 4096);
        write_family_file(replay_out,
                          result.family->materialize(index_bound, result.family->frontier()),
                          /*compact=*/true);
      }
    }
    if (result.m_history) {
      std::cout << "reconstructed permitting history: stages=" << result.m_history->size()
                << " final M size=" << result.m_history->back().size() << "\n";
    }
  });

  // global --trace/--format may appear after the subcommand
  auto enable_fallthrough = [](CLI::App* node, auto&& self) -> void {
    for (CLI::App* sub : node->get_subcommands({})) {
      sub->fallthrough();
      self(sub, self);
    }
  };
  enable_fallthrough(&app, enable_fallthrough);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  } catch (const TruncationError& e) {
    std::cerr << "undecided at truncation: " << e.what() << "\n";
    return kUndecided;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const ContractViolation& e) {
    std::cerr << "internal: " << e.what() << "\n";
    return kOracleFailure;
  }
  return exit_code;
}
