#include "logrepair/log/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <set>
#include <unordered_map>

#include "logrepair/error.hpp"
#include "logrepair/random.hpp"

namespace logrepair {
namespace {

Value value_from_json(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.get<double>();
  throw Error(ErrorCode::InvalidSpec, "attribute rule values must be strings or numbers");
}

AttributeKind kind_of_rule(const DerivedAttribute& attr) {
  const AttributeRule& r = attr.rule;
  if (r.kind == AttributeRule::Kind::Position) return AttributeKind::Numeric;
  std::vector<const Value*> values;
  for (const auto& [k, v] : r.by_activity) values.push_back(&v);
  for (const auto& v : r.cycle) values.push_back(&v);
  if (r.kind == AttributeRule::Kind::ByActivity) values.push_back(&r.fallback);
  const bool numeric = !values.empty() && std::holds_alternative<double>(*values.front());
  for (const Value* v : values) {
    if (std::holds_alternative<double>(*v) != numeric) {
      throw Error(ErrorCode::InvalidSpec, "attribute '" + attr.name + "' mixes numbers and strings");
    }
  }
  return numeric ? AttributeKind::Numeric : AttributeKind::Categorical;
}

Value evaluate_rule(const AttributeRule& rule, const std::string& activity, std::size_t position) {
  switch (rule.kind) {
    case AttributeRule::Kind::ByActivity: {
      auto it = rule.by_activity.find(activity);
      return it != rule.by_activity.end() ? it->second : rule.fallback;
    }
    case AttributeRule::Kind::PositionCycle:
      return rule.cycle[position % rule.cycle.size()];
    case AttributeRule::Kind::Position:
      return static_cast<double>(position);
  }
  return rule.fallback;
}

}  // namespace

ProcessSpec process_spec_from_json(const nlohmann::json& j) {
  try {
    ProcessSpec spec;
    spec.activities = j.at("activities").get<std::vector<std::string>>();
    for (const auto& e : j.value("edges", nlohmann::json::array())) {
      spec.edges.push_back(Transition{e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                                      e.value("p", 1.0)});
    }
    if (j.contains("durations")) {
      for (const auto& [act, range] : j.at("durations").items()) {
        spec.durations[act] = {range.at(0).get<std::int64_t>(), range.at(1).get<std::int64_t>()};
      }
    }
    for (const auto& a : j.value("attrs", nlohmann::json::array())) {
      DerivedAttribute attr;
      attr.name = a.at("name").get<std::string>();
      const auto& rule = a.at("rule");
      if (rule.is_string() && rule.get<std::string>() == "position") {
        attr.rule.kind = AttributeRule::Kind::Position;
      } else if (rule.is_object() && rule.contains("by_activity")) {
        attr.rule.kind = AttributeRule::Kind::ByActivity;
        for (const auto& [act, v] : rule.at("by_activity").items()) attr.rule.by_activity[act] = value_from_json(v);
        if (rule.contains("default")) attr.rule.fallback = value_from_json(rule.at("default"));
      } else if (rule.is_object() && rule.contains("cycle")) {
        attr.rule.kind = AttributeRule::Kind::PositionCycle;
        for (const auto& v : rule.at("cycle")) attr.rule.cycle.push_back(value_from_json(v));
      } else {
        throw Error(ErrorCode::InvalidSpec, "unknown rule for attribute '" + attr.name + "'");
      }
      spec.attrs.push_back(std::move(attr));
    }
    spec.start = j.value("start", spec.activities.empty() ? std::string{} : spec.activities.front());
    if (j.contains("ends")) spec.ends = j.at("ends").get<std::vector<std::string>>();
    spec.max_steps = j.value("max_steps", spec.max_steps);
    spec.min_gap_seconds = j.value("min_gap_seconds", spec.min_gap_seconds);
    spec.max_gap_seconds = j.value("max_gap_seconds", spec.max_gap_seconds);
    spec.origin = j.value("origin", spec.origin);
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("process spec: ") + e.what());
  }
}

void ProcessSpec::validate() const {
  if (activities.empty()) throw Error(ErrorCode::InvalidSpec, "no activities");
  std::set<std::string> known(activities.begin(), activities.end());
  if (known.size() != activities.size()) throw Error(ErrorCode::InvalidSpec, "duplicate activity");
  if (!known.count(start)) throw Error(ErrorCode::InvalidSpec, "unknown start '" + start + "'");
  if (max_steps == 0) throw Error(ErrorCode::InvalidSpec, "max_steps must be positive");
  if (min_gap_seconds < 0 || max_gap_seconds < min_gap_seconds) {
    throw Error(ErrorCode::InvalidSpec, "invalid trace gap range");
  }
  if (!parse_timestamp(origin)) throw Error(ErrorCode::InvalidSpec, "unparsable origin");

  std::unordered_map<std::string, double> out_mass;
  std::unordered_map<std::string, std::vector<std::string>> succ;
  for (const auto& e : edges) {
    if (!known.count(e.from) || !known.count(e.to)) {
      throw Error(ErrorCode::InvalidSpec, "edge " + e.from + "->" + e.to + " names an unknown activity");
    }
    if (!(e.p >= 0.0) || e.p > 1.0) {
      throw Error(ErrorCode::InvalidProbabilities, "edge " + e.from + "->" + e.to + " has p outside [0,1]");
    }
    out_mass[e.from] += e.p;
    succ[e.from].push_back(e.to);
  }
  for (const auto& [node, mass] : out_mass) {
    if (std::abs(mass - 1.0) > 1e-9) {
      throw Error(ErrorCode::InvalidProbabilities, "outgoing probabilities of '" + node + "' sum to " +
                                                       std::to_string(mass));
    }
  }
  for (const auto& e : ends) {
    if (!known.count(e)) throw Error(ErrorCode::InvalidSpec, "unknown end '" + e + "'");
  }
  for (const auto& [act, range] : durations) {
    if (!known.count(act)) throw Error(ErrorCode::InvalidSpec, "duration for unknown activity '" + act + "'");
    if (range.first < 1 || range.second < range.first) {
      throw Error(ErrorCode::InvalidSpec, "duration range of '" + act + "' must satisfy 1 <= lo <= hi");
    }
  }
  for (const auto& a : attrs) {
    if (a.name == "case_id" || a.name == "activity" || a.name == "timestamp") {
      throw Error(ErrorCode::InvalidSpec, "attribute name '" + a.name + "' is reserved");
    }
    if (a.rule.kind == AttributeRule::Kind::PositionCycle && a.rule.cycle.empty()) {
      throw Error(ErrorCode::InvalidSpec, "empty cycle for attribute '" + a.name + "'");
    }
    kind_of_rule(a);
  }

  // Every node reachable from start must be able to reach an end, otherwise
  // a walk can get trapped.
  auto is_end = [&](const std::string& a) {
    return std::find(ends.begin(), ends.end(), a) != ends.end() || !out_mass.count(a);
  };
  std::set<std::string> can_finish;
  for (const auto& a : activities) {
    if (is_end(a)) can_finish.insert(a);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : edges) {
      if (e.p > 0 && can_finish.count(e.to) && !can_finish.count(e.from) && !is_end(e.from)) {
        can_finish.insert(e.from);
        changed = true;
      }
    }
  }
  std::set<std::string> reached{start};
  std::deque<std::string> queue{start};
  while (!queue.empty()) {
    const std::string node = queue.front();
    queue.pop_front();
    if (!can_finish.count(node)) throw Error(ErrorCode::UnreachableEnd, "no end reachable from '" + node + "'");
    if (is_end(node)) continue;
    for (const auto& e : edges) {
      if (e.from == node && e.p > 0 && reached.insert(e.to).second) queue.push_back(e.to);
    }
  }
}

AttributeSchema ProcessSpec::schema() const {
  AttributeSchema s;
  s.attributes.push_back({"activity", AttributeKind::Categorical, AttributeScope::Event});
  s.attributes.push_back({"timestamp", AttributeKind::Timestamp, AttributeScope::Event});
  for (const auto& a : attrs) s.attributes.push_back({a.name, kind_of_rule(a), AttributeScope::Event});
  return s;
}

EventLog generate_synthetic_log(const ProcessSpec& spec, std::size_t n_traces, std::uint64_t seed) {
  spec.validate();
  std::unordered_map<std::string, std::vector<const Transition*>> out;
  for (const auto& e : spec.edges) out[e.from].push_back(&e);
  auto is_end = [&](const std::string& a) {
    return std::find(spec.ends.begin(), spec.ends.end(), a) != spec.ends.end() || !out.count(a);
  };

  EventLog log;
  log.schema = spec.schema();
  Rng rng(derive_seed(seed, 0x6e4));
  Timestamp clock = *parse_timestamp(spec.origin);
  const int width = static_cast<int>(std::to_string(n_traces).size());
  constexpr std::size_t kMaxAttempts = 10000;

  for (std::size_t t = 0; t < n_traces; ++t) {
    if (t > 0) clock.micros += uniform_int(rng, spec.min_gap_seconds, spec.max_gap_seconds) * 1000000;

    std::vector<std::string> walk;
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt == kMaxAttempts) {
        throw Error(ErrorCode::UnreachableEnd, "no walk within " + std::to_string(spec.max_steps) + " steps");
      }
      walk.assign(1, spec.start);
      while (!is_end(walk.back()) && walk.size() <= spec.max_steps) {
        const auto& choices = out.at(walk.back());
        double u = uniform01(rng);
        const Transition* pick = choices.back();
        for (const Transition* c : choices) {
          if (u < c->p) {
            pick = c;
            break;
          }
          u -= c->p;
        }
        walk.push_back(pick->to);
      }
      if (walk.size() <= spec.max_steps && is_end(walk.back())) break;
    }

    char id[32];
    std::snprintf(id, sizeof id, "case_%0*zu", width, t + 1);
    Trace trace{id, {}};
    Timestamp ts = clock;
    for (std::size_t pos = 0; pos < walk.size(); ++pos) {
      const std::string& act = walk[pos];
      if (pos > 0) {
        auto it = spec.durations.find(act);
        const auto range = it != spec.durations.end() ? it->second : std::pair<std::int64_t, std::int64_t>{60, 600};
        ts.micros += uniform_int(rng, range.first, range.second) * 1000000;
      }
      Event ev;
      ev.values.push_back(Cell::of(act));
      ev.values.push_back(Cell::of(ts));
      for (const auto& a : spec.attrs) ev.values.push_back(Cell::of(evaluate_rule(a.rule, act, pos)));
      trace.events.push_back(std::move(ev));
    }
    log.traces.push_back(std::move(trace));
  }
  return log;
}

}  // namespace logrepair
