#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "logrepair/log/timestamp.hpp"

namespace logrepair {

enum class AttributeKind { Categorical, Numeric, Timestamp };
enum class AttributeScope { Event, Trace };

std::string_view to_string(AttributeKind kind);
std::string_view to_string(AttributeScope scope);
AttributeKind parse_attribute_kind(std::string_view s);
AttributeScope parse_attribute_scope(std::string_view s);

struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::Categorical;
  AttributeScope scope = AttributeScope::Event;

  friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

/// Column layout of a log. `attributes` excludes the case id column, which
/// identifies traces rather than describing events.
struct AttributeSchema {
  std::vector<AttributeSpec> attributes;
  std::string case_id_column = "case_id";
  std::string activity_column = "activity";
  std::string timestamp_column = "timestamp";

  /// Throws InvalidSpec when an invariant is broken: activity must be a
  /// categorical event attribute, timestamp a timestamp event attribute,
  /// names unique.
  void validate() const;

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;  // throws MissingColumn
  std::size_t activity_index() const { return index_of(activity_column); }
  std::size_t timestamp_index() const { return index_of(timestamp_column); }
  std::size_t size() const { return attributes.size(); }

  friend bool operator==(const AttributeSchema&, const AttributeSchema&) = default;
};

using Value = std::variant<std::string, double, Timestamp>;

/// Canonical text rendering of a value (shortest round-trip form for numbers).
std::string format_value(const Value& v);

/// One cell of the log: Missing, or a typed value together with the exact
/// text it was read from. Equality looks at the typed value only.
class Cell {
 public:
  Cell() = default;

  static Cell missing() { return Cell{}; }
  static Cell of(Value v) {
    std::string text = format_value(v);
    return Cell{std::move(v), std::move(text)};
  }
  static Cell with_text(Value v, std::string text) { return Cell{std::move(v), std::move(text)}; }

  bool is_missing() const noexcept { return !value_.has_value(); }
  bool is_present() const noexcept { return value_.has_value(); }
  const Value& value() const { return *value_; }
  const std::string& text() const noexcept { return text_; }

  const std::string* as_string() const { return value_ ? std::get_if<std::string>(&*value_) : nullptr; }
  const double* as_number() const { return value_ ? std::get_if<double>(&*value_) : nullptr; }
  const Timestamp* as_timestamp() const { return value_ ? std::get_if<Timestamp>(&*value_) : nullptr; }

  friend bool operator==(const Cell& a, const Cell& b) { return a.value_ == b.value_; }

 private:
  Cell(Value v, std::string text) : value_(std::move(v)), text_(std::move(text)) {}

  std::optional<Value> value_;
  std::string text_;
};

/// Cells aligned with AttributeSchema::attributes.
struct Event {
  std::vector<Cell> values;

  friend bool operator==(const Event&, const Event&) = default;
};

struct Trace {
  std::string case_id;
  std::vector<Event> events;

  std::size_t size() const noexcept { return events.size(); }

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Which partition a log came from. Not part of structural equality.
enum class SplitTag { Whole, Train, Validation, Test };

struct EventLog {
  AttributeSchema schema;
  std::vector<Trace> traces;
  SplitTag split = SplitTag::Whole;

  std::size_t event_count() const;

  /// Throws InconsistentTrace / InvalidSpec / EmptyLog if any log-level
  /// invariant is violated (unique case ids, non-empty traces, cell count,
  /// ordering of present timestamps, constant trace attributes).
  void validate() const;

  friend bool operator==(const EventLog& a, const EventLog& b) {
    return a.schema == b.schema && a.traces == b.traces;
  }
};

/// Reorder the events of a trace so present timestamps are non-decreasing.
/// Events lacking a timestamp keep their position; the others are stably
/// sorted among the remaining slots.
void sort_events_by_timestamp(Trace& trace, std::size_t timestamp_index);

}  // namespace logrepair
