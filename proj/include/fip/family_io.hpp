#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fip/family.hpp"

namespace fip {

/// Line-oriented family-spec format. Grammar (see docs/formats.md):
///
///   family v1 I=<nat> U=<nat> [default=marker]
///   set <i>: <strictly increasing elements>
///   witness <i> <a>
///   gen <name> [k=v ...]
///
/// Every element <= U not listed on a `set` line is decided out, so parsed
/// families are always fully decided on their truncation. With
/// default=marker, missing `set` lines denote marker-only sets {2i}.
Family parse_family(std::istream& in);
Family parse_family_file(const std::string& path);
Family parse_family_text(const std::string& text);

/// Canonical serialization: header, optional witness, ascending set lines.
/// With compact=true, marker-only sets are elided under default=marker.
std::string format_family(const Family& family, bool compact = false);
void write_family_file(const std::string& path, const Family& family, bool compact = false);

/// Finite function table:  table v1 D=<n>  /  values: f(0) ... f(D-1)
struct FunctionTable {
  std::vector<Nat> values;

  Nat domain_size() const { return values.size(); }
  std::vector<Nat> range() const;  // sorted distinct values
};

FunctionTable parse_table(std::istream& in);
FunctionTable parse_table_file(const std::string& path);
std::string format_table(const FunctionTable& table);

/// A computably enumerable set presented by stages:
///   ce v1 S=<stages>
///   w <s>: <elements entering at stage s>
/// Stage 0 may be empty; each stage >= 1 must add at least one fresh
/// element (the advanced-approximation contract).
struct CeEnumeration {
  std::vector<std::vector<Nat>> added;  // added[s] = elements entering at stage s

  Nat stages() const { return added.size(); }
  /// Elements of W_s (all elements entered at stages <= s), sorted.
  std::vector<Nat> snapshot(Nat s) const;
  /// Least element of W_{s+1} - W_s.
  Nat least_new(Nat s_plus_1) const;
  void validate() const;  // throws InputError on contract violations
};

CeEnumeration parse_ce(std::istream& in);
CeEnumeration parse_ce_file(const std::string& path);
std::string format_ce(const CeEnumeration& ce);

// Generator families usable from `gen` lines and tests.
Family make_marker_family(Nat index_bound, Nat universe_bound);
Family make_common_element_family(Nat index_bound, Nat universe_bound, Nat common_odd);
Family make_random_marker_family(Nat index_bound, Nat universe_bound, Nat seed,
                                 Nat density_permille);

/// splitmix64: the deterministic mixing function behind `gen random`.
Nat splitmix64(Nat x);

}  // namespace fip
