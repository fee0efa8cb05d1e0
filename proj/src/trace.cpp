#include "fip/trace.hpp"

#include <fstream>
#include <sstream>

namespace fip {

TraceEvent& TraceEvent::with(const std::string& key, const std::string& value) {
  payload.emplace_back(key, value);
  return *this;
}

TraceEvent& TraceEvent::with(const std::string& key, Nat value) {
  payload.emplace_back(key, std::to_string(value));
  return *this;
}

const std::string& TraceEvent::field(const std::string& key) const {
  for (const auto& [k, v] : payload)
    if (k == key) return v;
  throw InputError("trace event '" + kind + "' lacks field " + key);
}

Nat TraceEvent::nat_field(const std::string& key) const {
  const std::string& v = field(key);
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw InputError("trace field " + key + " is not a natural: " + v);
  return static_cast<Nat>(std::stoull(v));
}

bool TraceEvent::has_field(const std::string& key) const {
  for (const auto& [k, v] : payload)
    if (k == key) return true;
  return false;
}

std::string Trace::serialize() const {
  std::ostringstream out;
  out << "trace v1 run=" << run_kind_ << "\n";
  for (const TraceEvent& ev : events_) {
    out << "stage=" << ev.stage;
    if (ev.substage) out << " substage=" << *ev.substage;
    out << " event=" << ev.kind;
    for (const auto& [k, v] : ev.payload) out << " " << k << "=" << v;
    out << "\n";
  }
  out << "end trace events=" << events_.size() << "\n";
  return out.str();
}

Trace Trace::parse(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty trace file");
  {
    std::istringstream head(line);
    std::string magic, version, run;
    head >> magic >> version >> run;
    if (magic != "trace" || version != "v1" || run.rfind("run=", 0) != 0)
      throw InputError("trace file must start with 'trace v1 run=<kind>'");
    Trace trace(run.substr(4));
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream iss(line);
      std::string tok;
      iss >> tok;
      if (tok == "end") {
        std::string rest;
        iss >> rest >> rest;  // "trace events=<n>"
        if (rest.rfind("events=", 0) != 0)
          throw InputError("malformed trace terminator: " + line);
        Nat count = static_cast<Nat>(std::stoull(rest.substr(7)));
        if (count != trace.events_.size())
          throw InputError("trace terminator count mismatch");
        trace.complete_ = true;
        return trace;
      }
      TraceEvent ev;
      bool have_stage = false, have_kind = false;
      bool malformed = false;
      do {
        auto eq = tok.find('=');
        if (eq == std::string::npos) {
          malformed = true;
          break;
        }
        std::string key = tok.substr(0, eq);
        std::string value = tok.substr(eq + 1);
        if (key == "stage") {
          ev.stage = static_cast<Nat>(std::stoull(value));
          have_stage = true;
        } else if (key == "substage") {
          ev.substage = static_cast<Nat>(std::stoull(value));
        } else if (key == "event") {
          ev.kind = value;
          have_kind = true;
        } else {
          ev.payload.emplace_back(key, value);
        }
      } while (iss >> tok);
      if (malformed || !have_stage || !have_kind) {
        // a mangled line mid-file is corruption; at the very end it is a
        // truncated trace, returned incomplete for the caller to flag
        std::string rest;
        if (std::getline(in, rest))
          throw InputError("malformed trace line: " + line);
        return trace;
      }
      trace.events_.push_back(std::move(ev));
    }
    // No terminator: truncated trace, returned incomplete for the caller
    // to flag.
    return trace;
  }
}

Trace Trace::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trace file: " + path);
  return parse(in);
}

void Trace::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write trace file: " + path);
  out << serialize();
}

std::string encode_string_field(std::span<const Nat> sigma) {
  if (sigma.empty()) return "eps";
  std::ostringstream out;
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    if (k) out << ",";
    out << sigma[k];
  }
  return out.str();
}

std::vector<Nat> decode_string_field(const std::string& text) {
  if (text == "eps") return {};
  std::vector<Nat> sigma;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (cur.empty()) throw InputError("malformed string field: " + text);
      sigma.push_back(static_cast<Nat>(std::stoull(cur)));
      cur.clear();
    } else if (c >= '0' && c <= '9') {
      cur += c;
    } else {
      throw InputError("malformed string field: " + text);
    }
  }
  if (cur.empty()) throw InputError("malformed string field: " + text);
  sigma.push_back(static_cast<Nat>(std::stoull(cur)));
  return sigma;
}

}  // namespace fip
