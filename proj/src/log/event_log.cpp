#include "logrepair/log/event_log.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

#include "logrepair/error.hpp"

namespace logrepair {

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::Categorical: return "categorical";
    case AttributeKind::Numeric: return "numeric";
    case AttributeKind::Timestamp: return "timestamp";
  }
  return "categorical";
}

std::string_view to_string(AttributeScope scope) {
  return scope == AttributeScope::Trace ? "trace" : "event";
}

AttributeKind parse_attribute_kind(std::string_view s) {
  if (s == "categorical") return AttributeKind::Categorical;
  if (s == "numeric") return AttributeKind::Numeric;
  if (s == "timestamp") return AttributeKind::Timestamp;
  throw Error(ErrorCode::InvalidSpec, "unknown attribute kind '" + std::string(s) + "'");
}

AttributeScope parse_attribute_scope(std::string_view s) {
  if (s == "event") return AttributeScope::Event;
  if (s == "trace") return AttributeScope::Trace;
  throw Error(ErrorCode::InvalidSpec, "unknown attribute scope '" + std::string(s) + "'");
}

void AttributeSchema::validate() const {
  std::unordered_set<std::string_view> seen;
  for (const auto& a : attributes) {
    if (a.name.empty()) throw Error(ErrorCode::InvalidSpec, "empty attribute name");
    if (a.name == case_id_column) {
      throw Error(ErrorCode::InvalidSpec, "case id column '" + a.name + "' listed as attribute");
    }
    if (!seen.insert(a.name).second) {
      throw Error(ErrorCode::InvalidSpec, "duplicate attribute '" + a.name + "'");
    }
  }
  const auto& act = attributes[index_of(activity_column)];
  if (act.kind != AttributeKind::Categorical || act.scope != AttributeScope::Event) {
    throw Error(ErrorCode::InvalidSpec, "activity column must be a categorical event attribute");
  }
  const auto& ts = attributes[index_of(timestamp_column)];
  if (ts.kind != AttributeKind::Timestamp || ts.scope != AttributeScope::Event) {
    throw Error(ErrorCode::InvalidSpec, "timestamp column must be a timestamp event attribute");
  }
}

std::optional<std::size_t> AttributeSchema::find(std::string_view name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t AttributeSchema::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error(ErrorCode::MissingColumn, std::string(name));
}

std::string format_value(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* t = std::get_if<Timestamp>(&v)) return format_timestamp(*t);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, std::get<double>(v));
  return std::string(buf, res.ptr);
}

std::size_t EventLog::event_count() const {
  std::size_t n = 0;
  for (const auto& t : traces) n += t.size();
  return n;
}

void EventLog::validate() const {
  schema.validate();
  if (traces.empty()) throw Error(ErrorCode::EmptyLog, "log has no traces");
  const std::size_t ts_index = schema.timestamp_index();
  std::unordered_set<std::string_view> ids;
  for (const auto& trace : traces) {
    if (!ids.insert(trace.case_id).second) {
      throw Error(ErrorCode::InconsistentTrace, "duplicate case id '" + trace.case_id + "'");
    }
    if (trace.events.empty()) {
      throw Error(ErrorCode::InconsistentTrace, "trace '" + trace.case_id + "' is empty");
    }
    const Timestamp* last = nullptr;
    for (const auto& ev : trace.events) {
      if (ev.values.size() != schema.size()) {
        throw Error(ErrorCode::InconsistentTrace, "event cell count differs from schema in '" + trace.case_id + "'");
      }
      if (const auto* ts = ev.values[ts_index].as_timestamp()) {
        if (last != nullptr && ts->micros < last->micros) {
          throw Error(ErrorCode::InconsistentTrace, "timestamps out of order in '" + trace.case_id + "'");
        }
        last = ts;
      }
    }
    for (std::size_t a = 0; a < schema.size(); ++a) {
      if (schema.attributes[a].scope != AttributeScope::Trace) continue;
      const Cell* first = nullptr;
      for (const auto& ev : trace.events) {
        const Cell& c = ev.values[a];
        if (c.is_missing()) continue;
        if (first == nullptr) {
          first = &c;
        } else if (!(*first == c)) {
          throw Error(ErrorCode::InconsistentTrace, "trace attribute '" + schema.attributes[a].name +
                                                        "' varies within '" + trace.case_id + "'");
        }
      }
    }
  }
}

void sort_events_by_timestamp(Trace& trace, std::size_t timestamp_index) {
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    if (trace.events[i].values[timestamp_index].is_present()) slots.push_back(i);
  }
  std::vector<Event> timed;
  timed.reserve(slots.size());
  for (std::size_t i : slots) timed.push_back(std::move(trace.events[i]));
  std::stable_sort(timed.begin(), timed.end(), [&](const Event& a, const Event& b) {
    return a.values[timestamp_index].as_timestamp()->micros < b.values[timestamp_index].as_timestamp()->micros;
  });
  for (std::size_t k = 0; k < slots.size(); ++k) trace.events[slots[k]] = std::move(timed[k]);
}

}  // namespace logrepair
