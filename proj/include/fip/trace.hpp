#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fip/family.hpp"

namespace fip {

/// One construction event. Events are strictly ordered by position in the
/// trace; (stage, substage) are recorded for auditing. Payload is an
/// ordered key-value record so serialization is byte-deterministic.
struct TraceEvent {
  Nat stage = 0;
  std::optional<Nat> substage;
  std::string kind;
  std::vector<std::pair<std::string, std::string>> payload;

  TraceEvent& with(const std::string& key, const std::string& value);
  TraceEvent& with(const std::string& key, Nat value);

  /// Payload lookup; throws InputError if the key is absent.
  const std::string& field(const std::string& key) const;
  Nat nat_field(const std::string& key) const;
  bool has_field(const std::string& key) const;
};

/// Append-only event log of a run, replayable and auditable.
class Trace {
 public:
  Trace() = default;
  explicit Trace(std::string run_kind) : run_kind_(std::move(run_kind)) {}

  const std::string& run_kind() const { return run_kind_; }
  const std::vector<TraceEvent>& events() const { return events_; }
  bool complete() const { return complete_; }
  void mark_complete() { complete_ = true; }

  void emit(TraceEvent ev) { events_.push_back(std::move(ev)); }

  std::string serialize() const;
  static Trace parse(std::istream& in);
  static Trace parse_file(const std::string& path);
  void write_file(const std::string& path) const;

 private:
  std::string run_kind_;
  std::vector<TraceEvent> events_;
  bool complete_ = false;
};

/// Encode a string over naturals for a payload field: entries joined by
/// commas, the empty string spelled "eps".
std::string encode_string_field(std::span<const Nat> sigma);
std::vector<Nat> decode_string_field(const std::string& text);

}  // namespace fip
