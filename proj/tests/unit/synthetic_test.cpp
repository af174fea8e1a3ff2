#include "doctest.h"
#include "logrepair/error.hpp"
#include "logrepair/log/synthetic.hpp"
#include "oracles.hpp"

using namespace logrepair;
using nlohmann::json;

namespace {

std::vector<std::string> activities(const Trace& t) {
  std::vector<std::string> out;
  for (const auto& e : t.events) out.push_back(*e.values[0].as_string());
  return out;
}

ProcessSpec xor_spec() {
  return process_spec_from_json(json::parse(R"({
    "activities": ["A", "B", "C", "D"],
    "edges": [{"from": "A", "to": "B", "p": 0.5}, {"from": "A", "to": "C", "p": 0.5},
              {"from": "B", "to": "D"}, {"from": "C", "to": "D"}],
    "durations": {"A": [10, 20]}
  })"));
}

}  // namespace

TEST_CASE("linear spec yields the single path") {
  const ProcessSpec spec = process_spec_from_json(json::parse(R"({
    "activities": ["A", "B", "C"],
    "edges": [{"from": "A", "to": "B", "p": 1.0}, {"from": "B", "to": "C", "p": 1.0}]
  })"));
  const EventLog log = generate_synthetic_log(spec, 1, 123);
  REQUIRE(log.traces.size() == 1);
  CHECK(activities(log.traces[0]) == std::vector<std::string>{"A", "B", "C"});
  const auto& ev = log.traces[0].events;
  for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i].values[1].as_timestamp()->micros > ev[i - 1].values[1].as_timestamp()->micros);
}

TEST_CASE("XOR branch frequency within four sigma") {
  const EventLog log = generate_synthetic_log(xor_spec(), 10000, 123);
  std::size_t b = 0;
  for (const auto& t : log.traces) b += activities(t)[1] == "B" ? 1 : 0;
  const double frac = static_cast<double>(b) / 10000.0;
  CHECK(frac >= 0.48);
  CHECK(frac <= 0.52);
  CHECK_NOTHROW(log.validate());
}

TEST_CASE("generation is deterministic under seed") {
  CHECK(generate_synthetic_log(xor_spec(), 50, 7) == generate_synthetic_log(xor_spec(), 50, 7));
  CHECK_FALSE(generate_synthetic_log(xor_spec(), 50, 7) == generate_synthetic_log(xor_spec(), 50, 8));
}

TEST_CASE("derived attributes are functions of activity and position") {
  const ProcessSpec spec = process_spec_from_json(json::parse(oracle::slurp(oracle::bundled_path("deterministic_spec.json"))));
  const EventLog log = generate_synthetic_log(spec, 30, 1);
  std::map<std::string, std::string> owner;
  for (const auto& t : log.traces)
    for (const auto& e : t.events) {
      const auto [it, fresh] = owner.emplace(*e.values[0].as_string(), *e.values[2].as_string());
      CHECK(it->second == *e.values[2].as_string());
    }
}

TEST_CASE("spec validation errors") {
  auto code = [](const char* text) {
    try {
      process_spec_from_json(json::parse(text)).validate();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::FormatError;
  };
  CHECK(code(R"({"activities":["A","B"],"edges":[{"from":"A","to":"B","p":0.7}]})") == ErrorCode::InvalidProbabilities);
  CHECK(code(R"({"activities":["A","B","C"],"edges":[{"from":"A","to":"B","p":1},{"from":"B","to":"A","p":1}],"ends":["C"]})") ==
        ErrorCode::UnreachableEnd);
}
