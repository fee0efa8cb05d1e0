#include "fip/adversary.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

namespace fip {

namespace {

constexpr Nat kNow = ~Nat{0};
constexpr Nat kNoBound = ~Nat{0};

// ---- strategies --------------------------------------------------------

class SilentStrategy final : public Strategy {
 public:
  std::string name() const override { return "silent"; }
  void reset() override {}
  std::vector<Convergence> step(const StrategyView&) override { return {}; }
};

/**
 * Chases the construction: seeds with index 0, then keeps enumerating the
 * least designated set that currently intersects everything enumerated so
 * far, waiting `delay` stages between convergences. Respects the
 * pairwise-witness convention by design.
 */
class GreedyStrategy final : public Strategy {
 public:
  explicit GreedyStrategy(Nat delay) : delay_(delay) {}

  std::string name() const override { return "greedy delay=" + std::to_string(delay_); }

  void reset() override {
    next_arg_ = 0;
    last_emit_stage_.reset();
    emitted_.clear();
  }

  std::vector<Convergence> step(const StrategyView& view) override {
    if (next_arg_ > view.released.size()) return {};  // previous emission still pending
    if (next_arg_ == 0) {
      last_emit_stage_ = view.stage;
      emitted_.push_back(0);
      ++next_arg_;
      return {Convergence{0, 0}};
    }
    if (last_emit_stage_ && view.stage - *last_emit_stage_ <= delay_) return {};
    // designated indices arrive in ascending order; anything beyond the
    // stage was born too late for the witness convention to ever hold
    std::vector<Nat> pool;
    for (Nat q : view.designated) {
      if (q > view.stage) break;
      pool.push_back(q);
    }
    for (Nat q : pool) {
      if (std::find(emitted_.begin(), emitted_.end(), q) != emitted_.end()) continue;
      bool meets_all = true;
      for (Nat v : emitted_) {
        if (v == q) continue;
        if (!view.family.pair_witness_at(v, q, kNow, view.stage)) {
          meets_all = false;
          break;
        }
      }
      if (!meets_all) continue;
      last_emit_stage_ = view.stage;
      emitted_.push_back(q);
      return {Convergence{next_arg_++, q}};
    }
    return {};
  }

 private:
  Nat delay_;
  Nat next_arg_ = 0;
  std::optional<Nat> last_emit_stage_;
  std::vector<Nat> emitted_;
};

/// Fixed script: each entry reveals one argument at one stage.
class ScriptStrategy final : public Strategy {
 public:
  struct Entry {
    Nat arg, value, at_stage;
  };

  explicit ScriptStrategy(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  std::string name() const override {
    std::ostringstream out;
    out << "script";
    for (const Entry& entry : entries_)
      out << " " << entry.arg << "=" << entry.value << "@" << entry.at_stage;
    return out.str();
  }

  void reset() override {}

  std::vector<Convergence> step(const StrategyView& view) override {
    std::vector<Convergence> out;
    for (const Entry& entry : entries_)
      if (entry.at_stage == view.stage) out.push_back({entry.arg, entry.value});
    return out;
  }

 private:
  std::vector<Entry> entries_;
};

std::unique_ptr<Strategy> parse_strategy_line(const std::string& line) {
  std::istringstream iss(line);
  std::string kind;
  iss >> kind;
  if (kind == "silent") return std::make_unique<SilentStrategy>();
  if (kind == "greedy") {
    std::string tok;
    Nat delay = 0;
    while (iss >> tok) {
      if (tok.rfind("delay=", 0) == 0)
        delay = static_cast<Nat>(std::stoull(tok.substr(6)));
      else
        throw InputError("unknown greedy parameter: " + tok);
    }
    return std::make_unique<GreedyStrategy>(delay);
  }
  if (kind == "script") {
    std::vector<ScriptStrategy::Entry> entries;
    std::string tok;
    while (iss >> tok) {
      auto eq = tok.find('=');
      auto at = tok.find('@');
      if (eq == std::string::npos || at == std::string::npos || at < eq)
        throw InputError("script entries look like a=i@s, got: " + tok);
      ScriptStrategy::Entry entry;
      entry.arg = static_cast<Nat>(std::stoull(tok.substr(0, eq)));
      entry.value = static_cast<Nat>(std::stoull(tok.substr(eq + 1, at - eq - 1)));
      entry.at_stage = static_cast<Nat>(std::stoull(tok.substr(at + 1)));
      entries.push_back(entry);
    }
    return std::make_unique<ScriptStrategy>(std::move(entries));
  }
  throw InputError("unknown strategy kind: " + kind);
}

// ---- shared runner machinery -------------------------------------------

struct Opponent {
  std::map<Nat, Nat> desires;                     // arg -> value, not yet released
  std::vector<std::pair<Nat, Nat>> released_pairs;
  std::set<Nat> seen_args;                        // monotone revelation guard
  std::set<Nat> deferred_args;
};

struct Runner {
  AdversaryResult result;
  std::vector<Opponent> opponents;
  std::vector<Nat> designated;  // definition order, all opponents

  explicit Runner(StrategyList& strategies, const char* run_kind) {
    result.trace = Trace(run_kind);
    const Nat count = strategies.size();
    opponents.resize(count);
    result.released.resize(count);
    result.deferred_args.resize(count);
    result.traps.resize(count);
    result.potentials.resize(count);
    result.progressive_stages.resize(count);
    for (auto& s : strategies) {
      s->reset();
      result.strategy_names.push_back(s->name());
    }
  }

  Nat fresh_index(Nat stage) {
    Nat idx = std::max(result.family.high_water(), stage) + 1;
    result.family.note_number(idx);
    return idx;
  }

  Nat fresh_odd(Nat stage) {
    Nat o = std::max(result.family.high_water(), stage) + 1;
    if (o % 2 == 0) ++o;
    result.family.note_number(o);
    return o;
  }

  virtual void on_new_edge(Nat, Nat, Nat) {}

  /// Make two sets intersect unless they already do.
  void ensure_intersect(Nat i, Nat j, Nat stage, int step, std::optional<Nat> substage) {
    if (i == j) return;
    if (result.family.pair_witness_at(i, j, kNow, kNoBound)) return;
    Nat o = fresh_odd(stage);
    result.family.put_in(i, o, stage);
    result.family.put_in(j, o, stage);
    TraceEvent ev;
    ev.stage = stage;
    ev.substage = substage;
    ev.kind = "intersect";
    ev.with("i", i).with("j", j).with("n", o).with("step", std::to_string(step));
    result.trace.emit(std::move(ev));
    on_new_edge(i, j, o);
  }

  void collect_desires(StrategyList& strategies, Nat stage) {
    for (Nat e = 0; e < strategies.size(); ++e) {
      StrategyView view{stage, result.family, opponents[e].released_pairs, designated};
      for (const Convergence& c : strategies[e]->step(view)) {
        if (opponents[e].seen_args.count(c.arg))
          throw InputError("strategy " + result.strategy_names[e] +
                           " violates the revelation contract at argument " +
                           std::to_string(c.arg));
        opponents[e].seen_args.insert(c.arg);
        opponents[e].desires[c.arg] = c.value;
      }
    }
  }

  /// Release at most one computation for opponent e at this stage:
  /// arguments in order, argument <= stage, and the pairwise-witness
  /// convention against everything already enumerated. A computation that
  /// fails the convention is withheld (recorded once) and retried later.
  void try_release(Nat e, Nat stage) {
    Opponent& op = opponents[e];
    const Nat next_arg = op.released_pairs.size();
    auto it = op.desires.find(next_arg);
    if (it == op.desires.end() || next_arg > stage) return;
    const Nat value = it->second;
    for (const auto& [arg, old] : op.released_pairs) {
      if (old == value) continue;
      auto witness = result.family.pair_witness_at(old, value, kNow, stage);
      if (!witness) {
        if (!op.deferred_args.count(next_arg)) {
          op.deferred_args.insert(next_arg);
          result.deferred_args[e].push_back(next_arg);
          TraceEvent ev;
          ev.stage = stage;
          ev.kind = "defer";
          ev.with("e", e).with("a", next_arg).with("i", value).with("reason", "convention");
          result.trace.emit(std::move(ev));
        }
        return;
      }
    }
    op.desires.erase(it);
    op.released_pairs.emplace_back(next_arg, value);
    result.released[e].push_back(ConvergenceRecord{next_arg, value, stage});
    result.family.note_number(value);
    TraceEvent ev;
    ev.stage = stage;
    ev.kind = "converge";
    ev.with("e", e).with("a", next_arg).with("i", value);
    result.trace.emit(std::move(ev));
  }

  void define_event(Nat stage, std::optional<Nat> substage, const char* role, Nat index,
                    const std::vector<Nat>* owner, int label, bool redefine) {
    TraceEvent ev;
    ev.stage = stage;
    ev.substage = substage;
    ev.kind = "define";
    ev.with("role", role).with("i", index);
    if (owner) ev.with("owner", encode_string_field(*owner));
    if (label) ev.with("label", std::to_string(label));
    if (redefine) ev.with("redefine", "1");
    result.trace.emit(std::move(ev));
  }

  void totalize(Nat stage, std::optional<Nat> substage) {
    Nat target = result.family.high_water();
    if (target <= result.family.frontier()) return;
    result.family.raise_frontier(target, stage);
    TraceEvent ev;
    ev.stage = stage;
    ev.substage = substage;
    ev.kind = "totalize";
    ev.with("n", target);
    result.trace.emit(std::move(ev));
  }

  virtual ~Runner() = default;
};

}  // namespace

// ---- strategy plumbing --------------------------------------------------

StrategyList parse_strategies(std::istream& in) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    bool blank = true;
    for (char c : line)
      if (!isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank || line[line.find_first_not_of(" \t")] == '#') continue;
    std::istringstream iss(line);
    std::string a, b;
    iss >> a >> b;
    if (a != "strategies" || b != "v1")
      throw InputError("strategy file must start with 'strategies v1'");
    break;
  }
  StrategyList out;
  while (std::getline(in, line)) {
    bool blank = true;
    for (char c : line)
      if (!isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank || line[line.find_first_not_of(" \t")] == '#') continue;
    out.push_back(parse_strategy_line(line));
  }
  if (out.empty()) throw InputError("strategy file lists no strategies");
  return out;
}

StrategyList parse_strategies_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open strategy file: " + path);
  return parse_strategies(in);
}

std::string builtin_strategy_suite_text() {
  // Converging opponents sit at low substage indices: step 4 only fires
  // for arguments beyond the substage number, and deep convergence
  // stages are what the late viability levels need.
  return "strategies v1\n"
         "script 0=0@1 1=0@22 2=0@60 3=0@300 4=0@1500\n"
         "script 0=0@2 1=0@30 2=0@90 3=0@800\n"
         "script 0=0@3 1=0@40 2=0@120 3=0@1000\n"
         "greedy delay=0\n"
         "greedy delay=1\n"
         "greedy delay=2\n"
         "greedy delay=3\n"
         "greedy delay=5\n"
         "script 0=3@4 1=5@9 2=7@25 3=9@80\n"
         "silent\n";
}

StrategyList builtin_strategy_suite() {
  std::istringstream in(builtin_strategy_suite_text());
  return parse_strategies(in);
}

Nat AdversaryResult::convergence_stage(Nat e, Nat a) const {
  if (!has_convergence(e, a))
    throw InputError("no convergence recorded for opponent " + std::to_string(e) +
                     " at argument " + std::to_string(a));
  return released[e][a].stage;
}

bool AdversaryResult::has_convergence(Nat e, Nat a) const {
  return e < released.size() && a < released[e].size();
}

// ---- boundedness ---------------------------------------------------------

bool is_bounded(std::span<const Nat> sigma, Nat s, const ConstructionFamily& family) {
  if (sigma.empty()) throw InputError("the empty string is not bounded by anything");
  if (sigma.size() > s) return false;
  for (Nat entry : sigma)
    if (entry > s) return false;
  if (sigma.size() > 1) {
    if (s == 0) return false;
    for (std::size_t a = 0; a < sigma.size(); ++a)
      for (std::size_t b = a; b < sigma.size(); ++b)
        if (!family.pair_witness_at(sigma[a], sigma[b], s - 1, s - 1)) return false;
  }
  return true;
}

// ---- warmup ---------------------------------------------------------------

AdversaryResult run_warmup(StrategyList& strategies, const AdversaryParams& params) {
  Runner r(strategies, "warmup");
  const Nat count = strategies.size();
  std::vector<std::vector<Nat>> potentials(count);  // set indices, definition order

  for (Nat s = 0; s < params.stages; ++s) {
    r.result.family.note_number(s);
    r.collect_desires(strategies, s);
    for (Nat e = 0; e < count; ++e) r.try_release(e, s);

    for (Nat e = 0; e < count; ++e) {
      Opponent& op = r.opponents[e];
      if (r.result.traps[e].empty()) {
        if (op.released_pairs.empty()) continue;  // still waiting for the first value
        Nat p0 = r.fresh_index(s);
        r.result.potentials[e].push_back(
            PotentialRecord{p0, e, {}, 2, s, static_cast<Nat>(r.designated.size())});
        potentials[e].push_back(p0);
        r.designated.push_back(p0);
        r.define_event(s, e, "potential", p0, nullptr, 0, false);
        Nat t = r.fresh_index(s);
        r.result.traps[e].push_back(t);
        r.designated.push_back(t);
        r.define_event(s, e, "trap", t, nullptr, 0, false);
        continue;
      }

      const Nat trap = r.result.traps[e].back();
      const Nat current = potentials[e].back();
      std::vector<Nat> enumerated;
      for (const auto& [arg, value] : op.released_pairs) enumerated.push_back(value);

      bool enumerated_current =
          std::find(enumerated.begin(), enumerated.end(), current) != enumerated.end();
      if (!enumerated_current) {
        for (Nat i : enumerated) r.ensure_intersect(current, i, s, 3, e);
        continue;
      }

      // progressive: feed the trap everything enumerated strictly before
      // the newest enumerated potential set, then start a fresh chase
      TraceEvent ev;
      ev.stage = s;
      ev.substage = e;
      ev.kind = "progressive";
      ev.with("e", e);
      r.result.trace.emit(std::move(ev));
      r.result.progressive_stages[e].push_back(s);

      std::size_t newest = 0;
      for (std::size_t k = 0; k < enumerated.size(); ++k) {
        if (std::find(potentials[e].begin(), potentials[e].end(), enumerated[k]) !=
            potentials[e].end())
          newest = k;
      }
      for (std::size_t k = 0; k < newest; ++k)
        r.ensure_intersect(trap, enumerated[k], s, 4, e);

      Nat next = r.fresh_index(s);
      r.result.potentials[e].push_back(
          PotentialRecord{next, e, {}, 2, s, static_cast<Nat>(r.designated.size())});
      potentials[e].push_back(next);
      r.designated.push_back(next);
      r.define_event(s, e, "potential", next, nullptr, 0, false);
    }
    r.totalize(s, std::nullopt);
  }
  r.result.trace.mark_complete();
  r.result.stages = params.stages;
  return r.result;
}

// ---- full construction -----------------------------------------------------

namespace {

/// Interned strings plus incremental bounded-string discovery. String
/// entries can only ever be indices up to the stage budget, so the edge
/// table is pruned to that cap.
struct FullRunner : Runner {
  const AdversaryParams params;
  std::vector<std::vector<Nat>> strings;       // by id
  std::map<std::vector<Nat>, Nat> string_ids;
  std::vector<Nat> first_bounded;              // by id
  std::vector<std::vector<Nat>> extensions_of; // id -> bounded extensions (ids)

  std::map<std::pair<Nat, Nat>, Nat> edge_witness;  // least shared odd, small indices only
  std::map<Nat, Nat> potential_index;               // set index -> (e, rec) packed

  struct PerOpponent {
    std::map<Nat, Nat> potential_by_string;  // string id -> record position
    Nat step2_cursor = 0;
    struct Pending {
      Nat ready, seq, rec, sid;
      bool operator>(const Pending& o) const {
        return std::tie(ready, seq) > std::tie(o.ready, o.seq);
      }
    };
    std::priority_queue<Pending, std::vector<Pending>, std::greater<Pending>> step3;
    std::vector<std::pair<Nat, Nat>> skipped;  // (rec, sid) withheld by the trap gate
    std::vector<std::vector<Nat>> layers;      // viability layers, string ids
    bool redefined = false;
  };
  std::vector<PerOpponent> per;
  Nat pending_seq = 0;

  FullRunner(StrategyList& strategies, const AdversaryParams& p)
      : Runner(strategies, "full"), params(p) {
    per.resize(strategies.size());
  }

  void on_new_edge(Nat i, Nat j, Nat witness) override {
    if (i > j) std::swap(i, j);
    if (j > params.stages) return;  // never enumerable by a bounded string
    auto key = std::make_pair(i, j);
    auto it = edge_witness.find(key);
    if (it == edge_witness.end() || witness < it->second) edge_witness[key] = witness;
  }

  Nat intern(const std::vector<Nat>& sigma, Nat stage) {
    auto it = string_ids.find(sigma);
    if (it != string_ids.end()) return it->second;
    Nat id = strings.size();
    string_ids.emplace(sigma, id);
    strings.push_back(sigma);
    first_bounded.push_back(stage);
    extensions_of.emplace_back();
    result.bounded_strings.push_back(sigma);
    result.first_bounded.push_back(stage);
    // register under every proper prefix (prefixes are bounded no later)
    for (std::size_t len = 1; len < sigma.size(); ++len) {
      std::vector<Nat> prefix(sigma.begin(), sigma.begin() + len);
      auto pit = string_ids.find(prefix);
      if (pit != string_ids.end()) extensions_of[pit->second].push_back(id);
    }
    return id;
  }

  bool known(const std::vector<Nat>& sigma) const { return string_ids.count(sigma) > 0; }

  /// Strings newly bounded by s, appended in length-lex order. Length-one
  /// strings need only entry <= s; longer ones draw entries from the
  /// self-witnessed alphabet with pairwise witnesses at stage s-1.
  std::vector<Nat> discover(Nat s) {
    std::vector<Nat> fresh;
    if (s == 0) return fresh;
    for (Nat i = 0; i <= s; ++i) {
      std::vector<Nat> sigma{i};
      if (!known(sigma)) fresh.push_back(intern(sigma, s));
    }
    if (params.max_sigma_len < 2 || s < 2) return fresh;

    // Longer strings need pairwise witnesses, which only explicit
    // intersections create: walk the (small) edge table instead of the
    // whole alphabet. An endpoint also needs a self-witness <= s-1.
    auto self_witnessed = [&](Nat i) {
      return i <= s && result.family.least_element_at(i, s - 1, s - 1).has_value();
    };
    std::map<Nat, std::vector<Nat>> adj;
    for (const auto& [pair, witness] : edge_witness) {
      if (witness > s - 1) continue;
      auto [i, j] = pair;
      if (!self_witnessed(i) || !self_witnessed(j)) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
    for (auto& [i, partners] : adj) std::sort(partners.begin(), partners.end());

    std::vector<Nat> cur;
    auto rec = [&](auto&& self, std::size_t target_len) -> void {
      if (cur.size() == target_len) {
        if (!known(cur)) fresh.push_back(intern(cur, s));
        return;
      }
      // candidates adjacent to everything chosen so far (injective:
      // entries never repeat at this truncation)
      std::vector<Nat> candidates;
      if (cur.empty()) {
        for (const auto& [i, partners] : adj) candidates.push_back(i);
      } else {
        candidates = adj[cur[0]];
        for (std::size_t k = 1; k < cur.size(); ++k) {
          std::vector<Nat> next;
          std::set_intersection(candidates.begin(), candidates.end(), adj[cur[k]].begin(),
                                adj[cur[k]].end(), std::back_inserter(next));
          candidates = std::move(next);
        }
      }
      for (Nat i : candidates) {
        if (std::find(cur.begin(), cur.end(), i) != cur.end()) continue;
        cur.push_back(i);
        self(self, target_len);
        cur.pop_back();
      }
    };
    for (std::size_t len = 2; len <= params.max_sigma_len && len <= s; ++len) rec(rec, len);
    return fresh;
  }

  bool is_prefix(const std::vector<Nat>& a, const std::vector<Nat>& b) const {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
  }

  Nat current_trap(Nat e) const { return result.traps[e].back(); }
  bool has_trap(Nat e) const { return !result.traps[e].empty(); }

  bool enumerates(const std::vector<Nat>& sigma, Nat index) const {
    return std::find(sigma.begin(), sigma.end(), index) != sigma.end();
  }

  void define_potential(Nat e, Nat sid, Nat stage) {
    const std::vector<Nat>& owner = strings[sid];
    Nat p = fresh_index(stage);
    int label = has_trap(e) && enumerates(owner, current_trap(e)) ? 1 : 2;
    Nat rec = result.potentials[e].size();
    result.potentials[e].push_back(
        PotentialRecord{p, e, owner, label, stage, static_cast<Nat>(designated.size())});
    per[e].potential_by_string[sid] = rec;
    potential_index[p] = e * (Nat{1} << 32) + rec;
    designated.push_back(p);
    define_event(stage, e, "potential", p, &owner, label, false);
    // pair with already-bounded extensions, processable from the next stage
    for (Nat ext : extensions_of[sid])
      per[e].step3.push({stage + 1, pending_seq++, rec, ext});
    per[e].step3.push({stage + 1, pending_seq++, rec, sid});
  }

  void define_trap(Nat e, Nat stage, bool redefine) {
    Nat t = fresh_index(stage);
    result.traps[e].push_back(t);
    designated.push_back(t);
    define_event(stage, e, "trap", t, nullptr, 0, redefine);
  }

  void process_step3(Nat e, Nat rec, Nat sid, Nat stage) {
    const PotentialRecord& record = result.potentials[e][rec];
    const std::vector<Nat>& sigma = strings[sid];
    if (record.label == 2 && has_trap(e) && enumerates(sigma, current_trap(e))) {
      per[e].skipped.emplace_back(rec, sid);
      return;
    }
    std::vector<Nat> seen;
    for (Nat x : sigma) {
      if (x == record.set_index) continue;
      if (std::find(seen.begin(), seen.end(), x) != seen.end()) continue;
      seen.push_back(x);
      ensure_intersect(record.set_index, x, stage, 3, e);
    }
  }

  /// Viability layer `level` for opponent e, computed at its convergence
  /// stage. Layer 0 is the bounded length-one strings; layer b+1 needs a
  /// viable proper prefix and, for every substage c <= b, an enumerated
  /// c-potential set owned between that prefix and the string.
  void compute_layer(Nat e, Nat level, Nat s) {
    auto& layers = per[e].layers;
    if (layers.size() != level) throw ContractViolation("viability layers out of order");
    std::vector<Nat> layer;
    if (level == 0) {
      for (Nat sid = 0; sid < strings.size(); ++sid)
        if (strings[sid].size() == 1 && first_bounded[sid] <= s) layer.push_back(sid);
    } else {
      const std::vector<Nat>& prev = layers[level - 1];
      std::set<Nat> prev_set(prev.begin(), prev.end());
      for (Nat sid = 0; sid < strings.size(); ++sid) {
        if (first_bounded[sid] > s) continue;
        const std::vector<Nat>& sigma = strings[sid];
        if (sigma.size() < 2) continue;
        bool viable = false;
        for (std::size_t cut = 1; cut < sigma.size() && !viable; ++cut) {
          std::vector<Nat> prefix(sigma.begin(), sigma.begin() + cut);
          auto pit = string_ids.find(prefix);
          if (pit == string_ids.end() || !prev_set.count(pit->second)) continue;
          if (transition_ok(prefix, sigma, level - 1)) viable = true;
        }
        if (viable) layer.push_back(sid);
      }
    }
    layers.push_back(std::move(layer));
  }

  /// For every substage c <= top, sigma enumerates a c-potential set whose
  /// owner lies between `from` (inclusive) and sigma (exclusive).
  bool transition_ok(const std::vector<Nat>& from, const std::vector<Nat>& sigma, Nat top) {
    for (Nat c = 0; c <= top; ++c) {
      bool found = false;
      for (Nat x : sigma) {
        auto it = potential_index.find(x);
        if (it == potential_index.end()) continue;
        Nat oe = it->second >> 32;
        Nat rec = it->second & 0xFFFFFFFFULL;
        if (oe != c) continue;
        const std::vector<Nat>& owner = result.potentials[c][rec].owner;
        if (owner.size() >= sigma.size() || !is_prefix(owner, sigma)) continue;
        if (owner.size() < from.size() || !is_prefix(from, owner)) continue;
        found = true;
        break;
      }
      if (!found) return false;
    }
    return true;
  }

  void step4(Nat e, Nat a, Nat s) {
    const auto& layers = per[e].layers;
    if (layers.size() <= a) return;
    const std::vector<Nat>& viable = layers[a];
    if (viable.empty()) return;
    const std::vector<Nat>& prev = layers[a - 1];
    std::set<Nat> prev_set(prev.begin(), prev.end());
    const Nat trap = current_trap(e);

    struct Choice {
      Nat sid;
      std::size_t cutoff;  // first occurrence of the chosen set
    };

    // pass 1: the selected potential set of every viable string
    std::map<Nat, Nat> selected;  // sid -> p*
    std::set<Nat> selected_ids;
    for (Nat sid : viable) {
      const std::vector<Nat>& sigma = strings[sid];
      std::optional<Nat> least;
      for (Nat x : sigma) {
        auto it = potential_index.find(x);
        if (it == potential_index.end()) continue;
        if ((it->second >> 32) != e) continue;
        Nat rec = it->second & 0xFFFFFFFFULL;
        const std::vector<Nat>& owner = result.potentials[e][rec].owner;
        if (owner.size() >= sigma.size() || !is_prefix(owner, sigma)) continue;
        bool anchored = false;
        for (std::size_t cut = 1; cut <= owner.size() && !anchored; ++cut) {
          std::vector<Nat> prefix(sigma.begin(), sigma.begin() + cut);
          auto pit = string_ids.find(prefix);
          if (pit != string_ids.end() && prev_set.count(pit->second) &&
              is_prefix(prefix, owner) && transition_ok(prefix, sigma, a - 1))
            anchored = true;
        }
        if (!anchored) continue;
        if (!least || x < *least) least = x;
      }
      if (!least) return;  // not actually viable at this level: no action
      selected[sid] = *least;
      selected_ids.insert(*least);
    }

    // pass 2: one candidate per viable string, from the pre-action state
    std::vector<Choice> choices;
    for (Nat sid : viable) {
      const std::vector<Nat>& sigma = strings[sid];
      const Nat star = selected[sid];
      if (pair_now(star, trap)) return;  // its chosen set already meets the trap
      std::size_t star_pos = first_occurrence(sigma, star);
      std::optional<std::size_t> best;
      std::vector<Nat> seen;
      for (std::size_t pos = 0; pos < star_pos; ++pos) {
        Nat x = sigma[pos];
        if (x == star) continue;
        if (std::find(seen.begin(), seen.end(), x) != seen.end()) continue;
        seen.push_back(x);
        if (selected_ids.count(x)) continue;
        if (pair_now(x, trap)) continue;
        best = pos;  // positions ascend: the last assignment is the latest
      }
      if (!best) return;  // some viable string lacks a candidate: not progressive
      choices.push_back(Choice{sid, *best});
    }

    // pass 3: act
    {
      TraceEvent ev;
      ev.stage = s;
      ev.substage = e;
      ev.kind = "progressive";
      ev.with("e", e).with("a", a);
      result.trace.emit(std::move(ev));
      result.progressive_stages[e].push_back(s);
    }
    for (const Choice& choice : choices) {
      const std::vector<Nat>& sigma = strings[choice.sid];
      std::vector<Nat> seen;
      for (std::size_t pos = 0; pos <= choice.cutoff; ++pos) {
        Nat x = sigma[pos];
        if (std::find(seen.begin(), seen.end(), x) != seen.end()) continue;
        seen.push_back(x);
        ensure_intersect(trap, x, s, 4, e);
      }
    }
  }

  bool pair_now(Nat i, Nat j) { return result.family.pair_witness_at(i, j, kNow, kNoBound).has_value(); }

  static std::size_t first_occurrence(const std::vector<Nat>& sigma, Nat x) {
    for (std::size_t pos = 0; pos < sigma.size(); ++pos)
      if (sigma[pos] == x) return pos;
    throw ContractViolation("first_occurrence: entry not present");
  }
};

}  // namespace

AdversaryResult run_full(StrategyList& strategies, const AdversaryParams& params) {
  FullRunner r(strategies, params);
  const Nat count = strategies.size();

  for (Nat s = 0; s < params.stages; ++s) {
    r.result.family.note_number(s);

    std::vector<Nat> fresh = r.discover(s);
    for (Nat e = 0; e < count; ++e) {
      for (Nat sid : fresh) {
        const std::vector<Nat>& sigma = r.strings[sid];
        for (std::size_t len = 1; len <= sigma.size(); ++len) {
          std::vector<Nat> prefix(sigma.begin(), sigma.begin() + len);
          auto pit = r.string_ids.find(prefix);
          if (pit == r.string_ids.end()) continue;
          auto rec_it = r.per[e].potential_by_string.find(pit->second);
          if (rec_it == r.per[e].potential_by_string.end()) continue;
          if (r.result.potentials[e][rec_it->second].defined_stage >= s) continue;
          r.per[e].step3.push({s, r.pending_seq++, rec_it->second, sid});
        }
      }
    }

    r.collect_desires(strategies, s);
    for (Nat e = 0; e < count; ++e) {
      std::size_t before = r.result.released[e].size();
      r.try_release(e, s);
      if (r.result.released[e].size() > before)
        r.compute_layer(e, before, s);  // viability layer for the new argument
    }

    for (Nat e = 0; e < count && e <= s; ++e) {
      // Step 1: trap definition and the one redefinition
      if (!r.has_trap(e)) {
        r.define_trap(e, s, false);
      } else if (!r.per[e].redefined && !r.result.released[e].empty() &&
                 r.result.released[e][0].stage == s) {
        r.define_trap(e, s, true);
        r.per[e].redefined = true;
        for (auto& record : r.result.potentials[e]) {
          if (record.label == 1) {
            record.label = 2;
            TraceEvent ev;
            ev.stage = s;
            ev.substage = e;
            ev.kind = "relabel";
            ev.with("i", record.set_index);
            r.result.trace.emit(std::move(ev));
          }
        }
        for (const auto& [rec, sid] : r.per[e].skipped)
          r.per[e].step3.push({s, r.pending_seq++, rec, sid});
        r.per[e].skipped.clear();
      }

      // Step 2: a fresh potential set per newly bounded string
      for (Nat idx = r.per[e].step2_cursor; idx < r.strings.size(); ++idx)
        r.define_potential(e, idx, s);
      r.per[e].step2_cursor = r.strings.size();

      // Step 3: chase bounded extensions of owners
      while (!r.per[e].step3.empty() && r.per[e].step3.top().ready <= s) {
        auto pending = r.per[e].step3.top();
        r.per[e].step3.pop();
        r.process_step3(e, pending.rec, pending.sid, s);
      }

      // Step 4: at this opponent's convergence stages
      if (!r.result.released[e].empty()) {
        const auto& recs = r.result.released[e];
        for (Nat a = 0; a < recs.size(); ++a) {
          if (recs[a].stage == s && a > e) r.step4(e, a, s);
        }
      }

      // Step 5: totalize up to everything mentioned
      r.totalize(s, e);
    }
  }
  r.result.trace.mark_complete();
  r.result.stages = params.stages;
  return r.result;
}

// ---- witness function ------------------------------------------------------

namespace {

/// Least stage bounding sigma, from the final family history: length,
/// entries, and for longer strings one past the largest least-witness.
std::optional<Nat> first_bounded_stage(std::span<const Nat> sigma,
                                       const ConstructionFamily& family) {
  Nat s = sigma.size();
  for (Nat entry : sigma) s = std::max(s, entry);
  if (sigma.size() > 1) {
    for (std::size_t a = 0; a < sigma.size(); ++a) {
      for (std::size_t b = a; b < sigma.size(); ++b) {
        auto witness = family.pair_witness_at(sigma[a], sigma[b], kNow, kNoBound);
        if (!witness) return std::nullopt;
        s = std::max(s, *witness + 1);
      }
    }
  }
  return std::max(s, Nat{1});
}

}  // namespace

WitnessFunction extract_witness_function(const IndexMap& j_prefix, const AdversaryResult& run) {
  if (j_prefix.entries.empty())
    throw InputError("witness extraction needs a nonempty index prefix");
  for (std::size_t x = 0; x < j_prefix.entries.size(); ++x)
    for (std::size_t y = x + 1; y < j_prefix.entries.size(); ++y)
      if (!run.family.pair_witness_at(j_prefix.entries[x], j_prefix.entries[y], kNow, kNoBound))
        throw InputError("index prefix is not pairwise certified (entries " +
                         std::to_string(x) + ", " + std::to_string(y) + ")");

  // potential-set lookup: index -> (substage, record)
  std::map<Nat, std::pair<Nat, const PotentialRecord*>> by_index;
  for (Nat e = 0; e < run.potentials.size(); ++e)
    for (const PotentialRecord& rec : run.potentials[e])
      by_index[rec.set_index] = {e, &rec};

  WitnessFunction wf;
  wf.f.push_back(2 * j_prefix.entries[0]);
  wf.chain.push_back({j_prefix.entries[0]});

  for (Nat a = 0;; ++a) {
    const std::vector<Nat>& sigma_a = wf.chain.back();
    std::optional<Nat> best_stage;
    std::optional<std::size_t> best_len;
    for (std::size_t m = sigma_a.size() + 1; m <= j_prefix.entries.size(); ++m) {
      std::vector<Nat> sigma(j_prefix.entries.begin(), j_prefix.entries.begin() + m);
      auto bounded_from = first_bounded_stage(sigma, run.family);
      if (!bounded_from) continue;
      Nat need = *bounded_from;
      bool ok = true;
      for (Nat b = 0; b <= a && ok; ++b) {
        // least definition stage over b-potential sets enumerated by sigma
        // with owner between sigma_a and sigma
        std::optional<Nat> earliest;
        for (Nat x : sigma) {
          auto it = by_index.find(x);
          if (it == by_index.end() || it->second.first != b) continue;
          const PotentialRecord& rec = *it->second.second;
          if (rec.owner.size() >= sigma.size() ||
              !std::equal(rec.owner.begin(), rec.owner.end(), sigma.begin()))
            continue;
          if (rec.owner.size() < sigma_a.size() ||
              !std::equal(sigma_a.begin(), sigma_a.end(), rec.owner.begin()))
            continue;
          if (!earliest || rec.defined_stage < *earliest) earliest = rec.defined_stage;
        }
        if (!earliest)
          ok = false;
        else
          need = std::max(need, *earliest);
      }
      if (!ok) continue;
      if (!best_stage || need < *best_stage || (need == *best_stage && m < *best_len)) {
        best_stage = need;
        best_len = m;
      }
    }
    if (!best_stage) {
      wf.partial = true;
      break;
    }
    wf.f.push_back(*best_stage);
    wf.chain.push_back(std::vector<Nat>(j_prefix.entries.begin(),
                                        j_prefix.entries.begin() + *best_len));
    if (*best_len == j_prefix.entries.size()) break;  // the prefix is spent
  }
  return wf;
}

// ---- audits ----------------------------------------------------------------

namespace {

/// Shared scaffolding for post-hoc viability computations over a recorded
/// run's string registry and potential records.
struct RunIndex {
  const AdversaryResult& run;
  std::map<std::vector<Nat>, Nat> ids;
  std::map<Nat, std::pair<Nat, const PotentialRecord*>> by_index;

  explicit RunIndex(const AdversaryResult& r) : run(r) {
    for (Nat sid = 0; sid < r.bounded_strings.size(); ++sid)
      ids.emplace(r.bounded_strings[sid], sid);
    for (Nat e = 0; e < r.potentials.size(); ++e)
      for (const PotentialRecord& rec : r.potentials[e])
        by_index[rec.set_index] = {e, &rec};
  }

  static bool prefix_of(const std::vector<Nat>& a, const std::vector<Nat>& b) {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
  }

  bool transition_ok(const std::vector<Nat>& from, const std::vector<Nat>& sigma,
                     Nat top) const {
    for (Nat c = 0; c <= top; ++c) {
      bool found = false;
      for (Nat x : sigma) {
        auto it = by_index.find(x);
        if (it == by_index.end() || it->second.first != c) continue;
        const std::vector<Nat>& owner = it->second.second->owner;
        if (owner.size() >= sigma.size() || !prefix_of(owner, sigma)) continue;
        if (!prefix_of(from, owner)) continue;
        found = true;
        break;
      }
      if (!found) return false;
    }
    return true;
  }
};

}  // namespace

std::vector<std::vector<std::vector<Nat>>> viability_layers(const AdversaryResult& run, Nat e) {
  RunIndex index(run);
  std::vector<std::vector<std::vector<Nat>>> layers;
  if (e >= run.released.size()) return layers;
  for (Nat a = 0; a < run.released[e].size(); ++a) {
    const Nat s = run.released[e][a].stage;
    std::vector<std::vector<Nat>> layer;
    if (a == 0) {
      for (Nat sid = 0; sid < run.bounded_strings.size(); ++sid)
        if (run.bounded_strings[sid].size() == 1 && run.first_bounded[sid] <= s)
          layer.push_back(run.bounded_strings[sid]);
    } else {
      const auto& prev = layers[a - 1];
      for (Nat sid = 0; sid < run.bounded_strings.size(); ++sid) {
        if (run.first_bounded[sid] > s) continue;
        const std::vector<Nat>& sigma = run.bounded_strings[sid];
        if (sigma.size() < 2) continue;
        bool viable = false;
        for (const auto& shorter : prev) {
          if (shorter.size() >= sigma.size() || !RunIndex::prefix_of(shorter, sigma)) continue;
          if (index.transition_ok(shorter, sigma, a - 1)) {
            viable = true;
            break;
          }
        }
        if (viable) layer.push_back(sigma);
      }
    }
    layers.push_back(std::move(layer));
  }
  return layers;
}

std::vector<std::string> audit_trap_evasion(const AdversaryResult& run, Nat e) {
  std::vector<std::string> violations;
  if (e >= run.released.size() || run.traps[e].empty()) return violations;
  auto layers = viability_layers(run, e);
  for (Nat a = 0; a < layers.size(); ++a) {
    const Nat s = run.released[e][a].stage;
    // the run's final trap; any redefinition happened at the first
    // convergence, which is no later than s
    const Nat trap = run.traps[e].back();
    // window end: one before the first progressive stage after s
    Nat horizon = run.stages == 0 ? 0 : run.stages - 1;
    for (Nat p : run.progressive_stages[e]) {
      if (p > s) {
        horizon = p - 1;
        break;
      }
    }
    for (const auto& sigma : layers[a]) {
      bool some_disjoint = false;
      for (Nat x : sigma) {
        if (!run.family.pair_witness_at(x, trap, horizon, ~Nat{0})) {
          some_disjoint = true;
          break;
        }
      }
      if (!some_disjoint)
        violations.push_back("opponent " + std::to_string(e) + ", argument " +
                             std::to_string(a) +
                             ": a viable string lost every trap-disjoint set before the "
                             "next progressive stage");
    }
  }
  return violations;
}

IndexMap build_certified_prefix(const AdversaryResult& run, Nat max_len) {
  IndexMap j;
  j.entries.push_back(0);
  std::vector<Nat> spine{0};  // the previous round's prefix

  auto meets_all = [&](Nat candidate) {
    for (Nat x : j.entries) {
      if (x == candidate) return false;
      if (!run.family.pair_witness_at(x, candidate, kNow, kNoBound)) return false;
    }
    return true;
  };

  // Round r appends, for every substage c < r, a c-potential set owned at
  // or beyond the previous round's spine; the spines are then exactly the
  // chain links the witness function looks for.
  const Nat substages = run.potentials.size();
  for (Nat round = 1;; ++round) {
    bool complete = true;
    for (Nat c = 0; c < substages && c < round; ++c) {
      if (j.entries.size() >= max_len) {
        complete = false;
        break;
      }
      bool found = false;
      for (const PotentialRecord& rec : run.potentials[c]) {
        if (!RunIndex::prefix_of(spine, rec.owner)) continue;
        if (rec.owner.size() > j.entries.size() ||
            !std::equal(rec.owner.begin(), rec.owner.end(), j.entries.begin()))
          continue;
        if (!meets_all(rec.set_index)) continue;
        j.entries.push_back(rec.set_index);
        found = true;
        break;
      }
      if (!found) {
        complete = false;
        break;
      }
    }
    if (!complete) break;
    spine = j.entries;
  }
  return j;
}

std::vector<std::string> audit_freshness(const AdversaryResult& run) {
  std::vector<std::string> violations;
  std::map<Nat, std::string> seen;
  auto check = [&](Nat index, const std::string& what) {
    auto [it, inserted] = seen.emplace(index, what);
    if (!inserted)
      violations.push_back("index " + std::to_string(index) + " designated twice: " +
                           it->second + " and " + what);
  };
  for (Nat e = 0; e < run.traps.size(); ++e) {
    for (Nat t : run.traps[e]) check(t, "trap of opponent " + std::to_string(e));
    for (const PotentialRecord& rec : run.potentials[e])
      check(rec.set_index, "potential of opponent " + std::to_string(e));
  }
  return violations;
}

std::vector<std::string> audit_type2_discipline(const AdversaryResult& run) {
  std::vector<std::string> violations;
  // replay designations and labels in trace order
  std::map<Nat, std::pair<Nat, int>> potential_label;  // index -> (e, label)
  std::map<Nat, Nat> trap_of;                          // current trap index -> e
  std::map<Nat, std::set<Nat>> progressive;            // e -> stages seen so far
  for (const TraceEvent& ev : run.trace.events()) {
    if (ev.kind == "define") {
      Nat e = ev.substage.value();
      Nat index = ev.nat_field("i");
      if (ev.field("role") == "trap") {
        for (auto it = trap_of.begin(); it != trap_of.end();) {
          if (it->second == e)
            it = trap_of.erase(it);
          else
            ++it;
        }
        trap_of[index] = e;
      } else if (ev.has_field("label")) {
        potential_label[index] = {e, ev.field("label") == "1" ? 1 : 2};
      }
    } else if (ev.kind == "relabel") {
      Nat index = ev.nat_field("i");
      auto it = potential_label.find(index);
      if (it != potential_label.end()) it->second.second = 2;
    } else if (ev.kind == "progressive") {
      progressive[ev.substage.value()].insert(ev.stage);
    } else if (ev.kind == "intersect") {
      Nat i = ev.nat_field("i");
      Nat j = ev.nat_field("j");
      for (auto [x, y] : {std::pair(i, j), std::pair(j, i)}) {
        auto pot = potential_label.find(x);
        auto trap = trap_of.find(y);
        if (pot == potential_label.end() || trap == trap_of.end()) continue;
        if (pot->second.second != 2) continue;
        if (pot->second.first != trap->second) continue;  // someone else's trap
        Nat e = pot->second.first;
        bool at_step4 = ev.field("step") == "4";
        bool at_substage = ev.substage && *ev.substage == e;
        bool at_progressive = progressive[e].count(ev.stage) > 0;
        if (!(at_step4 && at_substage && at_progressive))
          violations.push_back("stage " + std::to_string(ev.stage) + ": type-2 potential " +
                               std::to_string(x) + " met trap " + std::to_string(y) +
                               " outside step 4 of a progressive stage");
      }
    }
  }
  return violations;
}

std::vector<std::string> audit_trap_redefinitions(const AdversaryResult& run) {
  std::vector<std::string> violations;
  std::map<Nat, std::vector<Nat>> redefine_stages;  // e -> stages of redefinitions
  for (const TraceEvent& ev : run.trace.events()) {
    if (ev.kind == "define" && ev.field("role") == "trap" && ev.has_field("redefine"))
      redefine_stages[ev.substage.value()].push_back(ev.stage);
  }
  for (Nat e = 0; e < run.traps.size(); ++e) {
    if (run.traps[e].size() > 2)
      violations.push_back("opponent " + std::to_string(e) + ": trap redefined more than once");
    const auto& stages = redefine_stages[e];
    if (stages.size() + 1 != std::max<std::size_t>(run.traps[e].size(), 1) &&
        !run.traps[e].empty())
      violations.push_back("opponent " + std::to_string(e) +
                           ": trap history and redefine events disagree");
    if (!stages.empty()) {
      if (run.released[e].empty() || stages[0] != run.released[e][0].stage)
        violations.push_back("opponent " + std::to_string(e) +
                             ": trap redefined away from the first convergence stage");
    }
  }
  return violations;
}

std::vector<std::string> audit_totality(const AdversaryResult& run) {
  std::vector<std::string> violations;
  const Nat frontier = run.family.frontier();
  for (Nat i : run.family.touched_indices()) {
    for (const auto& enumeration : *run.family.enumerations(i)) {
      if (enumeration.value > frontier)
        violations.push_back("element " + std::to_string(enumeration.value) + " of set " +
                             std::to_string(i) + " lies beyond the frontier " +
                             std::to_string(frontier));
    }
  }
  return violations;
}

std::vector<std::string> audit_warmup_trap_disjointness(const AdversaryResult& run) {
  std::vector<std::string> violations;
  for (Nat e = 0; e < run.progressive_stages.size(); ++e) {
    for (Nat s : run.progressive_stages[e]) {
      Nat trap = 0;
      bool have_trap = false;
      for (Nat t : run.traps[e]) have_trap = true, trap = t;
      if (!have_trap) continue;
      bool found_disjoint = false;
      for (const ConvergenceRecord& rec : run.released[e]) {
        if (rec.stage > s) break;
        if (!run.family.pair_witness_at(rec.value, trap, s, kNoBound)) {
          found_disjoint = true;
          break;
        }
      }
      if (!found_disjoint)
        violations.push_back("opponent " + std::to_string(e) + ", progressive stage " +
                             std::to_string(s) +
                             ": every enumerated set already meets the trap");
    }
  }
  return violations;
}

ViabilityAudit audit_viability(const WitnessFunction& wf, const AdversaryResult& run, Nat e) {
  ViabilityAudit audit;
  std::map<Nat, std::pair<Nat, const PotentialRecord*>> by_index;
  for (Nat oe = 0; oe < run.potentials.size(); ++oe)
    for (const PotentialRecord& rec : run.potentials[oe])
      by_index[rec.set_index] = {oe, &rec};

  for (Nat a = 1; a < wf.chain.size(); ++a) {
    bool premise = true;
    for (Nat b = 0; b <= a; ++b) {
      if (!run.has_convergence(e, b) || wf.f[b] > run.convergence_stage(e, b)) {
        premise = false;
        break;
      }
    }
    if (!premise) continue;
    ++audit.checked;

    auto complain = [&](const std::string& what) {
      audit.violations.push_back("chain link " + std::to_string(a) + " vs opponent " +
                                 std::to_string(e) + ": " + what);
    };
    if (wf.chain[0].size() != 1) complain("chain base is not a length-one string");
    for (Nat b = 0; b <= a; ++b) {
      if (!is_bounded(wf.chain[b], run.convergence_stage(e, b), run.family))
        complain("link " + std::to_string(b) + " not bounded by its convergence stage");
    }
    for (Nat b = 0; b + 1 <= a; ++b) {
      const std::vector<Nat>& lo = wf.chain[b];
      const std::vector<Nat>& hi = wf.chain[b + 1];
      for (Nat c = 0; c <= b; ++c) {
        bool found = false;
        for (Nat x : hi) {
          auto it = by_index.find(x);
          if (it == by_index.end() || it->second.first != c) continue;
          const std::vector<Nat>& owner = it->second.second->owner;
          if (owner.size() >= hi.size() ||
              !std::equal(owner.begin(), owner.end(), hi.begin()))
            continue;
          if (owner.size() < lo.size() || !std::equal(lo.begin(), lo.end(), owner.begin()))
            continue;
          found = true;
          break;
        }
        if (!found)
          complain("no substage-" + std::to_string(c) + " potential set between links " +
                   std::to_string(b) + " and " + std::to_string(b + 1));
      }
    }
  }
  return audit;
}

}  // namespace fip
