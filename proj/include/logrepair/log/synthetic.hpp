#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "logrepair/log/event_log.hpp"

namespace logrepair {

/// Value of a derived attribute as a pure function of (activity, position).
struct AttributeRule {
  enum class Kind {
    ByActivity,     // lookup table keyed by activity, with a default
    PositionCycle,  // values[position % values.size()]
    Position,       // the 0-based position itself (numeric)
  };
  Kind kind = Kind::ByActivity;
  std::map<std::string, Value> by_activity;
  std::vector<Value> cycle;
  Value fallback = std::string("none");
};

struct DerivedAttribute {
  std::string name;
  AttributeRule rule;
};

struct Transition {
  std::string from;
  std::string to;
  double p = 1.0;
};

/// Probabilistic control-flow graph. The walk starts at `start` and stops on
/// entering any of `ends` (default: nodes without outgoing edges).
struct ProcessSpec {
  std::vector<std::string> activities;
  std::vector<Transition> edges;
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> durations;  // seconds, inclusive
  std::vector<DerivedAttribute> attrs;
  std::string start;
  std::vector<std::string> ends;
  std::size_t max_steps = 200;
  std::int64_t min_gap_seconds = 60;    // between consecutive trace starts
  std::int64_t max_gap_seconds = 3600;
  std::string origin = "2020-01-01 00:00:00+00:00";

  /// Throws InvalidProbabilities, UnreachableEnd or InvalidSpec.
  void validate() const;

  /// The schema of generated logs: case_id, activity, timestamp, then attrs.
  AttributeSchema schema() const;
};

/// Parses `{activities, edges:[{from,to,p}], durations:{act:[lo,hi]},
/// attrs:[{name, rule}]}` plus optional start/ends/max_steps/gap/origin.
ProcessSpec process_spec_from_json(const nlohmann::json& j);

/// Seeded random walks; rejection-resamples walks longer than max_steps.
EventLog generate_synthetic_log(const ProcessSpec& spec, std::size_t n_traces, std::uint64_t seed);

}  // namespace logrepair
