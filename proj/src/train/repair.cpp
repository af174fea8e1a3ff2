#include "logrepair/train/repair.hpp"

#include <algorithm>

#include "logrepair/error.hpp"
#include "logrepair/graph/hetero_graph.hpp"

namespace logrepair {

namespace {

bool has_missing(const Trace& t) {
  for (const auto& e : t.events) {
    for (const auto& c : e.values) {
      if (c.is_missing()) return true;
    }
  }
  return false;
}

void repair_trace(Trace& trace, const ModelParams& params, const EncoderSet& enc) {
  const Trace original = trace;
  const EventMask none(trace.size(), false);
  const HeteroGraph graph = build_graph(trace, none, enc);
  const std::vector<Repair> repairs = predict_repair(graph, params, enc);
  const AttributeSchema& schema = enc.schema;

  for (const Repair& r : repairs) {
    Cell& cell = trace.events[r.event].values[r.attribute];
    if (cell.is_present()) continue;
    cell = Cell::of(r.value);
  }

  for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
    if (schema.attributes[a].scope != AttributeScope::Trace) continue;
    // Prefer a value observed in the trace, else the first prediction.
    const Cell* source = nullptr;
    for (const auto& e : original.events) {
      if (e.values[a].is_present()) {
        source = &e.values[a];
        break;
      }
    }
    const Cell fill = source ? *source : [&] {
      for (std::size_t i = 0; i < original.size(); ++i) {
        if (original.events[i].values[a].is_missing()) return trace.events[i].values[a];
      }
      return Cell::missing();
    }();
    for (std::size_t i = 0; i < original.size(); ++i) {
      if (original.events[i].values[a].is_missing()) trace.events[i].values[a] = fill;
    }
  }

  const std::size_t ts = schema.timestamp_index();
  std::optional<Timestamp> lower;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    Cell& cell = trace.events[i].values[ts];
    if (original.events[i].values[ts].is_missing() && cell.is_present()) {
      Timestamp t = *cell.as_timestamp();
      std::optional<Timestamp> upper;
      for (std::size_t j = i + 1; j < trace.size(); ++j) {
        if (const Timestamp* u = original.events[j].values[ts].as_timestamp()) {
          upper = *u;
          break;
        }
      }
      if (lower && t.micros < lower->micros) t.micros = lower->micros;
      if (upper && t.micros > upper->micros) t.micros = upper->micros;
      cell = Cell::of(t);
    }
    if (const Timestamp* cur = cell.as_timestamp()) lower = *cur;
  }
}

}  // namespace

EventLog repair_log(const EventLog& damaged, const ModelParams& params, const EncoderSet& enc) {
  if (!(damaged.schema == enc.schema)) {
    throw Error(ErrorCode::SchemaMismatch, "log schema differs from the schema the encoders were fitted on");
  }
  if (params.schema_hash != schema_hash(enc)) {
    throw Error(ErrorCode::SchemaMismatch, "parameters were trained against different encoders");
  }
  EventLog out = damaged;
  for (Trace& t : out.traces) {
    if (has_missing(t)) repair_trace(t, params, enc);
  }
  return out;
}

}  // namespace logrepair
