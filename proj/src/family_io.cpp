#include "fip/family_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace fip {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream iss(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (iss >> tok) tokens.push_back(tok);
  return tokens;
}

bool skippable(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Nat parse_nat(const std::string& text, const std::string& what) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    throw InputError("expected a natural number for " + what + ", got '" + text + "'");
  return static_cast<Nat>(std::stoull(text));
}

/// Parses "k=v" into (k, v); throws if '=' missing.
std::pair<std::string, std::string> parse_kv(const std::string& tok) {
  auto eq = tok.find('=');
  if (eq == std::string::npos) throw InputError("expected key=value, got '" + tok + "'");
  return {tok.substr(0, eq), tok.substr(eq + 1)};
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  return in;
}

Family generate(const std::string& name, const std::map<std::string, Nat>& params,
                Nat index_bound, Nat universe_bound) {
  auto param = [&](const std::string& key, std::optional<Nat> fallback = {}) -> Nat {
    auto it = params.find(key);
    if (it != params.end()) return it->second;
    if (fallback) return *fallback;
    throw InputError("generator '" + name + "' needs parameter " + key);
  };
  if (name == "disjoint") return make_marker_family(index_bound, universe_bound);
  if (name == "common")
    return make_common_element_family(index_bound, universe_bound, param("w"));
  if (name == "random")
    return make_random_marker_family(index_bound, universe_bound, param("seed"),
                                     param("density", 300));
  throw InputError("unknown generator family '" + name + "'");
}

}  // namespace

Family parse_family(std::istream& in) {
  std::string line;
  // header
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    header = tokenize(line);
    break;
  }
  if (header.size() < 2 || header[0] != "family" || header[1] != "v1")
    throw InputError("family file must start with 'family v1 I=... U=...'");
  std::optional<Nat> index_bound, universe_bound;
  bool default_marker = false;
  for (std::size_t k = 2; k < header.size(); ++k) {
    auto [key, value] = parse_kv(header[k]);
    if (key == "I")
      index_bound = parse_nat(value, "I");
    else if (key == "U")
      universe_bound = parse_nat(value, "U");
    else if (key == "default" && value == "marker")
      default_marker = true;
    else
      throw InputError("unknown family header field '" + header[k] + "'");
  }
  if (!index_bound || !universe_bound)
    throw InputError("family header must carry I= and U=");

  Family family(*index_bound, *universe_bound);
  std::vector<bool> seen(*index_bound, false);
  std::optional<std::pair<Nat, Nat>> witness;

  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    auto tokens = tokenize(line);
    if (tokens[0] == "set") {
      if (tokens.size() < 2 || tokens[1].back() != ':')
        throw InputError("malformed set line: " + line);
      Nat i = parse_nat(tokens[1].substr(0, tokens[1].size() - 1), "set index");
      if (i >= *index_bound) throw InputError("set index " + std::to_string(i) + " >= I");
      if (seen[i]) throw InputError("duplicate set line for index " + std::to_string(i));
      seen[i] = true;
      std::optional<Nat> prev;
      for (std::size_t k = 2; k < tokens.size(); ++k) {
        Nat n = parse_nat(tokens[k], "set element");
        if (n > *universe_bound)
          throw InputError("element " + std::to_string(n) + " exceeds U in set " +
                           std::to_string(i));
        if (prev && n <= *prev)
          throw InputError("set " + std::to_string(i) + " elements must be strictly increasing");
        prev = n;
        family.set_mutable(i).put_in(n);
      }
    } else if (tokens[0] == "witness") {
      if (tokens.size() != 3) throw InputError("malformed witness line: " + line);
      witness = {parse_nat(tokens[1], "witness index"), parse_nat(tokens[2], "witness element")};
    } else if (tokens[0] == "gen") {
      if (tokens.size() < 2) throw InputError("malformed gen line: " + line);
      std::map<std::string, Nat> params;
      for (std::size_t k = 2; k < tokens.size(); ++k) {
        auto [key, value] = parse_kv(tokens[k]);
        params[key] = parse_nat(value, key);
      }
      Family generated = generate(tokens[1], params, *index_bound, *universe_bound);
      if (witness) generated.set_nontrivial_witness(witness->first, witness->second);
      return generated;
    } else {
      throw InputError("unrecognized family line: " + line);
    }
  }

  for (Nat i = 0; i < *index_bound; ++i) {
    if (!seen[i] && !default_marker)
      throw InputError("missing set line for index " + std::to_string(i) +
                       " (and no default=marker)");
    if (!seen[i]) {
      Nat marker = 2 * i;
      if (marker <= *universe_bound) family.set_mutable(i).put_in(marker);
    }
    family.set_mutable(i).raise_frontier(*universe_bound);
  }
  if (witness) family.set_nontrivial_witness(witness->first, witness->second);
  return family;
}

Family parse_family_file(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_family(in);
}

Family parse_family_text(const std::string& text) {
  std::istringstream in(text);
  return parse_family(in);
}

std::string format_family(const Family& family, bool compact) {
  std::ostringstream out;
  out << "family v1 I=" << family.index_bound() << " U=" << family.universe_bound();
  if (compact) out << " default=marker";
  out << "\n";
  if (auto w = family.nontrivial_witness())
    out << "witness " << w->first << " " << w->second << "\n";
  for (Nat i = 0; i < family.index_bound(); ++i) {
    const auto& in_elems = family.set(i).decided_in();
    if (compact && in_elems.size() == 1 && in_elems[0] == 2 * i) continue;
    out << "set " << i << ":";
    for (Nat n : in_elems)
      if (n <= family.universe_bound()) out << " " << n;
    out << "\n";
  }
  return out.str();
}

void write_family_file(const std::string& path, const Family& family, bool compact) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path);
  out << format_family(family, compact);
}

std::vector<Nat> FunctionTable::range() const {
  std::vector<Nat> r = values;
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

FunctionTable parse_table(std::istream& in) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    header = tokenize(line);
    break;
  }
  if (header.size() != 3 || header[0] != "table" || header[1] != "v1")
    throw InputError("table file must start with 'table v1 D=<n>'");
  auto [key, value] = parse_kv(header[2]);
  if (key != "D") throw InputError("table header must carry D=");
  Nat domain = parse_nat(value, "D");

  FunctionTable table;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    auto tokens = tokenize(line);
    if (tokens[0] != "values:") throw InputError("expected 'values:' line in table file");
    for (std::size_t k = 1; k < tokens.size(); ++k)
      table.values.push_back(parse_nat(tokens[k], "table value"));
  }
  if (table.values.size() != domain)
    throw InputError("table lists " + std::to_string(table.values.size()) +
                     " values but D=" + std::to_string(domain));
  if (table.values.empty()) throw InputError("table must have nonempty domain");
  return table;
}

FunctionTable parse_table_file(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_table(in);
}

std::string format_table(const FunctionTable& table) {
  std::ostringstream out;
  out << "table v1 D=" << table.domain_size() << "\nvalues:";
  for (Nat v : table.values) out << " " << v;
  out << "\n";
  return out.str();
}

std::vector<Nat> CeEnumeration::snapshot(Nat s) const {
  std::vector<Nat> w;
  for (Nat t = 0; t <= s && t < added.size(); ++t)
    w.insert(w.end(), added[t].begin(), added[t].end());
  std::sort(w.begin(), w.end());
  return w;
}

Nat CeEnumeration::least_new(Nat s_plus_1) const {
  if (s_plus_1 >= added.size() || added[s_plus_1].empty())
    throw InputError("c.e. enumeration adds nothing at stage " + std::to_string(s_plus_1));
  return *std::min_element(added[s_plus_1].begin(), added[s_plus_1].end());
}

void CeEnumeration::validate() const {
  std::vector<Nat> all;
  for (Nat s = 0; s < added.size(); ++s) {
    if (s >= 1 && added[s].empty())
      throw InputError("c.e. enumeration violates its freshness contract: stage " +
                       std::to_string(s) + " adds nothing");
    for (Nat x : added[s]) all.push_back(x);
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw InputError("c.e. enumeration lists an element twice");
}

CeEnumeration parse_ce(std::istream& in) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    header = tokenize(line);
    break;
  }
  if (header.size() != 3 || header[0] != "ce" || header[1] != "v1")
    throw InputError("c.e. file must start with 'ce v1 S=<stages>'");
  auto [key, value] = parse_kv(header[2]);
  if (key != "S") throw InputError("c.e. header must carry S=");
  Nat stages = parse_nat(value, "S");

  CeEnumeration ce;
  ce.added.resize(stages);
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    auto tokens = tokenize(line);
    if (tokens.size() < 2 || tokens[0] != "w" || tokens[1].back() != ':')
      throw InputError("malformed c.e. line: " + line);
    Nat s = parse_nat(tokens[1].substr(0, tokens[1].size() - 1), "c.e. stage");
    if (s >= stages) throw InputError("c.e. stage " + std::to_string(s) + " >= S");
    for (std::size_t k = 2; k < tokens.size(); ++k)
      ce.added[s].push_back(parse_nat(tokens[k], "c.e. element"));
  }
  ce.validate();
  return ce;
}

CeEnumeration parse_ce_file(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_ce(in);
}

std::string format_ce(const CeEnumeration& ce) {
  std::ostringstream out;
  out << "ce v1 S=" << ce.stages() << "\n";
  for (Nat s = 0; s < ce.stages(); ++s) {
    if (ce.added[s].empty()) continue;
    out << "w " << s << ":";
    for (Nat x : ce.added[s]) out << " " << x;
    out << "\n";
  }
  return out.str();
}

Family make_marker_family(Nat index_bound, Nat universe_bound) {
  Family family(index_bound, universe_bound);
  for (Nat i = 0; i < index_bound; ++i) {
    if (2 * i <= universe_bound) family.set_mutable(i).put_in(2 * i);
    family.set_mutable(i).raise_frontier(universe_bound);
  }
  return family;
}

Family make_common_element_family(Nat index_bound, Nat universe_bound, Nat common_odd) {
  if (common_odd % 2 == 0) throw InputError("common element must be odd");
  if (common_odd > universe_bound) throw InputError("common element exceeds U");
  Family family(index_bound, universe_bound);
  for (Nat i = 0; i < index_bound; ++i) {
    if (2 * i <= universe_bound) family.set_mutable(i).put_in(2 * i);
    family.set_mutable(i).put_in(common_odd);
    family.set_mutable(i).raise_frontier(universe_bound);
  }
  return family;
}

Nat splitmix64(Nat x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Family make_random_marker_family(Nat index_bound, Nat universe_bound, Nat seed,
                                 Nat density_permille) {
  Family family(index_bound, universe_bound);
  for (Nat i = 0; i < index_bound; ++i) {
    if (2 * i <= universe_bound) family.set_mutable(i).put_in(2 * i);
    for (Nat n = 1; n <= universe_bound; n += 2) {
      Nat roll = splitmix64(seed ^ splitmix64(i * 0x10001ULL + n));
      if (roll % 1000 < density_permille) family.set_mutable(i).put_in(n);
    }
    family.set_mutable(i).raise_frontier(universe_bound);
  }
  return family;
}

}  // namespace fip
