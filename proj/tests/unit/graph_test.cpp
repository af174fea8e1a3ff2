#include <random>
#include <sstream>

#include "doctest.h"
#include "logrepair/error.hpp"
#include "logrepair/graph/encoders.hpp"
#include "logrepair/graph/hetero_graph.hpp"
#include "logrepair/graph/mask.hpp"
#include "logrepair/log/csv.hpp"
#include "logrepair/log/schema_io.hpp"
#include "logrepair/log/synthetic.hpp"
#include "oracles.hpp"

using namespace logrepair;

namespace {

AttributeSchema three_attr_schema() {
  return schema_from_json(nlohmann::json::parse(
      R"({"attributes":[{"name":"activity"},{"name":"timestamp","kind":"timestamp"},{"name":"resource"}]})"));
}

EventLog small_log() {
  std::istringstream in(
      "case_id,activity,timestamp,resource\n"
      "c1,A,2020-01-01 00:00:00,r1\n"
      "c1,B,2020-01-01 00:01:00,r2\n"
      "c1,A,2020-01-01 00:03:00,r1\n"
      "c2,C,2020-01-02 00:00:00,r2\n"
      "c2,B,2020-01-02 00:10:00,-\n");
  return parse_csv_log(in, three_attr_schema());
}

std::vector<std::size_t> flagged(const EventMask& m) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) out.push_back(i);
  return out;
}

EventLog synthetic(std::size_t n, std::uint64_t seed) {
  const ProcessSpec spec = process_spec_from_json(nlohmann::json::parse(oracle::slurp(oracle::bundled_path("deterministic_spec.json"))));
  return generate_synthetic_log(spec, n, seed);
}

}  // namespace

TEST_CASE("vocabularies in first-seen order with the reserved class last") {
  const EncoderSet enc = fit_encoders(small_log());
  CHECK(enc.attributes[0].vocabulary == std::vector<std::string>{"A", "B", "C", "MISSING VALUE"});
  CHECK(enc.attributes[2].vocabulary == std::vector<std::string>{"r1", "r2", "MISSING VALUE"});
  CHECK(encode_value(Cell::of(std::string("B")), enc.attributes[0]) == std::vector<double>{0, 1, 0, 0});
  CHECK(encode_value(Cell::missing(), enc.attributes[0]) == std::vector<double>{0, 0, 0, 1});
  CHECK(encode_value(Cell::of(std::string("Z")), enc.attributes[0]) == std::vector<double>{0, 0, 0, 1});
}

TEST_CASE("numeric encoding") {
  AttributeEncoder e;
  e.name = "amount";
  e.kind = AttributeKind::Numeric;
  CHECK(transform_value(Cell::of(0.0), e, std::nullopt) == 0.0);
  CHECK(transform_value(Cell::of(std::exp(1.0) - 1.0), e, std::nullopt) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(encode_value(Cell::missing(), e) == std::vector<double>{-1.0});
  CHECK(inverse_transform(0.0, e) == 0.0);
  CHECK(inverse_transform(-3.0, e) == 0.0);
  bool threw = false;
  try {
    transform_value(Cell::of(-2.0), e, std::nullopt);
  } catch (const Error& err) {
    threw = err.code() == ErrorCode::NegativeDerivedValue;
  }
  CHECK(threw);
}

TEST_CASE("all-missing categorical column has only the reserved class") {
  std::istringstream in("case_id,activity,timestamp,resource\nc,A,2020-01-01 00:00:00,-\n");
  const EncoderSet enc = fit_encoders(parse_csv_log(in, three_attr_schema()));
  CHECK(enc.attributes[2].vocabulary == std::vector<std::string>{"MISSING VALUE"});
}

TEST_CASE("encoders survive JSON round trip") {
  const EncoderSet enc = fit_encoders(synthetic(20, 3));
  const EncoderSet back = encoders_from_json(encoders_to_json(enc));
  CHECK(encoders_to_json(back) == encoders_to_json(enc));
  CHECK(back.attributes[0].class_of("close") == enc.attributes[0].class_of("close"));
}

TEST_CASE("mask strategies") {
  CHECK(flagged(apply_mask(5, MaskStrategy::odd(), 0)) == std::vector<std::size_t>{1, 3});
  CHECK(flagged(apply_mask(5, MaskStrategy::even(), 0)) == std::vector<std::size_t>{0, 2, 4});
  CHECK(flagged(apply_mask(7, MaskStrategy::window(), 0)) == std::vector<std::size_t>{1, 2, 4, 5});
  CHECK(flagged(apply_mask(4, MaskStrategy::explicit_indices({2}), 0)) == std::vector<std::size_t>{2});
  CHECK(apply_mask(9, MaskStrategy::random(0.5), 42) == apply_mask(9, MaskStrategy::random(0.5), 42));

  const EventMask big = apply_mask(10000, MaskStrategy::random(0.5), 123);
  const double frac = static_cast<double>(flagged(big).size()) / 10000.0;
  CHECK(frac >= 0.48);
  CHECK(frac <= 0.52);

  // A single-event trace under RANDOM keeps its event whatever the draw.
  for (std::uint64_t s = 0; s < 50; ++s) CHECK_FALSE(apply_mask(1, MaskStrategy::random(0.9), s)[0]);

  for (std::size_t len = 1; len < 12; ++len) {
    const EventMask o = apply_mask(len, MaskStrategy::odd(), 0), e = apply_mask(len, MaskStrategy::even(), 0);
    for (std::size_t i = 0; i < len; ++i) CHECK(o[i] != e[i]);
  }
  CHECK(parse_mask_strategy("window").kind == MaskStrategy::Kind::Window);
  CHECK_THROWS_AS(parse_mask_strategy("sideways"), Error);
  CHECK_THROWS_AS(apply_mask(3, MaskStrategy::explicit_indices({3}), 0), Error);
}

TEST_CASE("missing runs and coverage") {
  CHECK(max_missing_run(apply_mask(7, MaskStrategy::window(), 0)) == 2);
  const EventMask m{false, true, true, true, true, true, false};
  CHECK(max_missing_run(m) == 5);
  CHECK(coverage_check(m, 2).has_value());
  CHECK_FALSE(coverage_check(m, 3).has_value());
  CHECK(max_missing_run(EventMask(4, false)) == 0);
  CHECK_FALSE(coverage_check(EventMask(4, false), 1).has_value());
}

TEST_CASE("graph of a 3-event, 3-attribute trace") {
  const EventLog log = small_log();
  const EncoderSet enc = fit_encoders(log);
  const HeteroGraph g = build_graph(log.traces[0], EventMask(3, false), enc);
  CHECK(g.node_count() == 9);
  CHECK(g.edge_count() == 24);
  const auto rels = relation_types(enc.schema);
  CHECK(rels.size() == 10);
  for (std::size_t r = 0; r < rels.size(); ++r) {
    if (rels[r].reverse()) continue;
    const auto twin = std::find_if(rels.begin(), rels.end(), [&](const RelationType& t) {
      return t.reverse() && t.src == rels[r].dst && t.dst == rels[r].src &&
             (t.kind == RelationKind::Previous) == (rels[r].kind == RelationKind::Next);
    });
    REQUIRE(twin != rels.end());
    const auto& rev = g.edges[static_cast<std::size_t>(twin - rels.begin())];
    for (const auto& [s, d] : g.edges[r]) {
      CHECK(std::find(rev.begin(), rev.end(), Edge{d, s}) != rev.end());
      if (rels[r].kind == RelationKind::Next) CHECK(d == s + 1);
      if (rels[r].kind == RelationKind::Describes) {
        CHECK(s == d);
        CHECK(rels[r].src == 0);
      }
    }
  }
}

TEST_CASE("masked rows carry the missing encoding and targets") {
  const EventLog log = small_log();
  const EncoderSet enc = fit_encoders(log);
  const HeteroGraph g = build_graph(log.traces[0], EventMask{false, true, false}, enc);
  CHECK(g.nodes[0].mask == std::vector<bool>{false, true, false});
  CHECK(g.nodes[0].features(1, 3) == 1.0);
  CHECK(g.nodes[0].features(1, 1) == 0.0);
  CHECK(g.nodes[1].features(1, 0) == -1.0);
  CHECK(g.nodes[0].target_class[1] == 1);
  CHECK(g.nodes[0].has_target[1]);
  CHECK(g.nodes[1].target_value[1] == doctest::Approx(std::log1p(60.0)));
  CHECK_FALSE(g.nodes[0].has_target[0]);

  // A cell that is missing in the data is flagged but has no target.
  const HeteroGraph g2 = build_graph(log.traces[1], EventMask(2, false), enc);
  CHECK(g2.nodes[2].mask[1]);
  CHECK_FALSE(g2.nodes[2].has_target[1]);

  CHECK_THROWS_AS(build_graph(log.traces[0], EventMask(2, false), enc), Error);
}

TEST_CASE("smallest graph: one fully masked event, two attributes") {
  const AttributeSchema s = schema_from_json(nlohmann::json::parse(
      R"({"attributes":[{"name":"activity"},{"name":"timestamp","kind":"timestamp"}]})"));
  std::istringstream in("case_id,activity,timestamp\nc,A,2020-01-01 00:00:00\n");
  const EventLog log = parse_csv_log(in, s);
  const EncoderSet enc = fit_encoders(log);
  const HeteroGraph g = build_graph(log.traces[0], EventMask{true}, enc);
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 2);
  CHECK(g.nodes[0].mask[0]);
  CHECK(g.nodes[1].mask[0]);
}

TEST_CASE("features never depend on masked ground truth") {
  const EventLog log = synthetic(40, 8);
  const EncoderSet enc = fit_encoders(log);
  for (const auto& strategy : MaskStrategy::standard())
    for (std::size_t t = 0; t < log.traces.size(); ++t) {
      const EventMask mask = apply_mask(log.traces[t].size(), strategy, t);
      Trace scrambled = log.traces[t];
      for (std::size_t i = 0; i < scrambled.size(); ++i)
        if (mask[i])
          for (auto& c : scrambled.events[i].values) c = Cell::missing();
      const HeteroGraph a = build_graph(log.traces[t], mask, enc);
      const HeteroGraph b = build_graph(scrambled, mask, enc);
      for (std::size_t k = 0; k < a.nodes.size(); ++k) CHECK(a.nodes[k].features == b.nodes[k].features);
    }
}

TEST_CASE("batching is a lossless disjoint union") {
  const EventLog log = synthetic(12, 4);
  const EncoderSet enc = fit_encoders(log);
  std::vector<HeteroGraph> gs;
  for (std::size_t t = 0; t < log.traces.size(); ++t)
    gs.push_back(build_graph(log.traces[t], apply_mask(log.traces[t].size(), MaskStrategy::random(0.5), t), enc));
  const GraphBatch batch = batch_graphs(gs);
  std::size_t nodes = 0;
  for (const auto& g : gs) nodes += g.node_count();
  CHECK(batch.rows() * batch.nodes.size() == nodes);
  const auto back = unbatch(batch);
  REQUIRE(back.size() == gs.size());
  for (std::size_t i = 0; i < gs.size(); ++i) {
    CHECK(back[i].trace_len == gs[i].trace_len);
    CHECK(back[i].edges == gs[i].edges);
    CHECK(back[i].case_id == gs[i].case_id);
    for (std::size_t a = 0; a < gs[i].nodes.size(); ++a) {
      CHECK(back[i].nodes[a].features == gs[i].nodes[a].features);
      CHECK(back[i].nodes[a].mask == gs[i].nodes[a].mask);
      CHECK(back[i].nodes[a].target_class == gs[i].nodes[a].target_class);
    }
  }
  // Edges stay inside their graph.
  for (const auto& list : batch.edges)
    for (const auto& [s, d] : list) CHECK(batch.graph_of_row[s] == batch.graph_of_row[d]);

  // Second graph's edges are shifted by the first graph's row count.
  const GraphBatch two = batch_graphs(std::span<const HeteroGraph>(gs).first(2));
  CHECK(two.edges[0].back().first == gs[0].trace_len + gs[1].edges[0].back().first);

  const auto single = unbatch(batch_graphs(std::span<const HeteroGraph>(gs).first(1)));
  CHECK(single[0].edges == gs[0].edges);
  CHECK(single[0].nodes[1].features == gs[0].nodes[1].features);

  HeteroGraph odd = gs[0];
  odd.nodes.pop_back();
  std::vector<HeteroGraph> mixed{gs[0], odd};
  CHECK_THROWS_AS(batch_graphs(mixed), Error);
}
