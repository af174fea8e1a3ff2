#include <random>
#include <sstream>

#include "doctest.h"
#include "logrepair/error.hpp"
#include "logrepair/log/csv.hpp"
#include "logrepair/log/schema_io.hpp"
#include "logrepair/log/synthetic.hpp"
#include "logrepair/model/hgnn.hpp"
#include "oracles.hpp"

using namespace logrepair;

namespace {

EventLog synthetic(const char* spec_file, std::size_t n, std::uint64_t seed) {
  const ProcessSpec spec = process_spec_from_json(nlohmann::json::parse(oracle::slurp(oracle::bundled_path(spec_file))));
  return generate_synthetic_log(spec, n, seed);
}

std::vector<HeteroGraph> graphs_for(const EventLog& log, const EncoderSet& enc, const MaskStrategy& s) {
  std::vector<HeteroGraph> out;
  for (std::size_t t = 0; t < log.traces.size(); ++t)
    out.push_back(build_graph(log.traces[t], apply_mask(log.traces[t].size(), s, t), enc));
  return out;
}

ModelConfig small_config(std::size_t layers = 2, std::size_t hidden = 8) {
  ModelConfig c;
  c.hidden_size = hidden;
  c.layers = layers;
  c.seed = 99;
  return c;
}

/// Hand-built two-attribute batch with one target per attribute.
GraphBatch toy_batch(double numeric_target) {
  GraphBatch b;
  b.nodes.resize(2);
  b.nodes[0].categorical = true;
  b.nodes[0].features = Tensor(1, 2);
  b.nodes[0].mask = {true};
  b.nodes[0].has_target = {true};
  b.nodes[0].target_class = {0};
  b.nodes[0].target_value = {0};
  b.nodes[1].categorical = false;
  b.nodes[1].features = Tensor(1, 1);
  b.nodes[1].mask = {true};
  b.nodes[1].has_target = {true};
  b.nodes[1].target_class = {-1};
  b.nodes[1].target_value = {numeric_target};
  b.row_offset = {0, 1};
  b.graph_of_row = {0};
  return b;
}

Predictions toy_predictions(Tape& tape, Tensor logits, double value) {
  Predictions p;
  p.attributes.push_back({tape.constant(std::move(logits)), {0}, {0}, {0}});
  p.attributes.push_back({tape.constant(Tensor::from_rows({{value}})), {0}, {0}, {0}});
  return p;
}

}  // namespace

TEST_CASE("parameter layout") {
  const EventLog log = synthetic("deterministic_spec.json", 20, 1);
  const EncoderSet enc = fit_encoders(log);
  ModelConfig cfg;
  cfg.hidden_size = 128;
  const ModelParams p = init_params(enc, cfg);
  CHECK(p.relations.size() == 10);
  CHECK(p.layers.size() == 2);
  CHECK(p.layers[0].size() == 10);
  const Tensor& head = p.params[p.heads[2].weight].value;
  CHECK(head.rows() == 128);
  CHECK(head.cols() == enc.attributes[2].width());
  for (std::size_t i = 0; i < p.params.size(); ++i) CHECK(p.params[i].id == i);
  CHECK(p.params[p.layers[1][3].bias].value == Tensor(1, 128));

  const ModelParams q = init_params(enc, cfg);
  for (std::size_t i = 0; i < p.params.size(); ++i) CHECK(p.params[i].value == q.params[i].value);
  cfg.seed = 124;
  CHECK_FALSE(init_params(enc, cfg).params[0].value == p.params[0].value);

  // Glorot bound on an input projection.
  const Tensor& w = p.params[p.input[0].weight].value;
  const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (double v : w.values()) CHECK(std::abs(v) <= bound);
}

TEST_CASE("a four-class head is hidden x 4") {
  std::istringstream in("case_id,activity,timestamp\nc,A,2020-01-01 00:00:00\nc,B,2020-01-01 00:01:00\nc,C,2020-01-01 00:02:00\n");
  const AttributeSchema s = schema_from_json(nlohmann::json::parse(
      R"({"attributes":[{"name":"activity"},{"name":"timestamp","kind":"timestamp"}]})"));
  const EncoderSet enc = fit_encoders(parse_csv_log(in, s));
  const ModelParams p = init_params(enc, ModelConfig{});
  const Tensor& head = p.params[p.heads[0].weight].value;
  CHECK(head.rows() == 128);
  CHECK(head.cols() == 4);
}

TEST_CASE("SAGE convolution with identity weights") {
  Tape tape;
  const Var eye = tape.constant(Tensor::from_rows({{1, 0}, {0, 1}}));
  const Var zero = tape.constant(Tensor(1, 2));
  const Var dst = tape.constant(Tensor::from_rows({{1, 2}}));
  const Var src = tape.constant(Tensor::from_rows({{3, 4}, {5, 6}}));
  CHECK(sage_conv(dst, src, Groups::from_lists({{0, 1}}), eye, eye, zero, Aggregator::Mean).value() ==
        Tensor::from_rows({{5, 7}}));
  const Var bias = tape.constant(Tensor::from_rows({{0.5, -1}}));
  CHECK(sage_conv(dst, src, Groups::from_lists({{}}), eye, eye, bias, Aggregator::Mean).value() ==
        Tensor::from_rows({{1.5, 1}}));
}

TEST_CASE("SAGE convolution matches a dense path-graph oracle") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-1, 1);
  auto rnd = [&](std::size_t r, std::size_t c) {
    Tensor t(r, c);
    for (auto& v : t.values()) v = d(rng);
    return t;
  };
  const Tensor h = rnd(3, 4), w1 = rnd(4, 5), w2 = rnd(4, 5), b = rnd(1, 5);
  Tensor adj(3, 3);
  adj(0, 1) = adj(1, 0) = adj(1, 2) = adj(2, 1) = 1;
  Tape tape;
  const Var hv = tape.constant(h);
  const Tensor got = sage_conv(hv, hv, Groups::from_lists({{1}, {0, 2}, {1}}), tape.constant(w1), tape.constant(w2),
                               tape.constant(b), Aggregator::Mean)
                         .value();
  CHECK(max_abs_diff(got, oracle::dense_sage_mean(h, adj, w1, w2, b)) < 1e-10);
}

TEST_CASE("prediction rows follow the masks") {
  const EventLog log = synthetic("long_lanes_spec.json", 3, 1);
  const EncoderSet enc = fit_encoders(log);
  const ModelParams p = init_params(enc, small_config());
  Trace five = log.traces[0];
  five.events.resize(5);
  Trace six = log.traces[0];
  six.events.resize(6);
  Tape tape;
  const auto g5 = build_graph(five, apply_mask(5, MaskStrategy::window(), 0), enc);
  const auto g6 = build_graph(six, apply_mask(6, MaskStrategy::window(), 0), enc);
  CHECK(forward(tape, batch_graphs(std::span<const HeteroGraph>(&g5, 1)), p).row_count() == 9);
  CHECK(forward(tape, batch_graphs(std::span<const HeteroGraph>(&g6, 1)), p).row_count() == 12);

  const auto clean = build_graph(five, EventMask(5, false), enc);
  const GraphBatch cb = batch_graphs(std::span<const HeteroGraph>(&clean, 1));
  const Predictions none = forward(tape, cb, p);
  CHECK(none.row_count() == 0);
  CHECK(compute_loss(none, cb, tape).value()(0, 0) == 0.0);
}

TEST_CASE("loss arithmetic") {
  Tape tape;
  const GraphBatch b = toy_batch(1.5);
  const Predictions p = toy_predictions(tape, Tensor::from_rows({{0, 0}}), 1.0);
  CHECK(compute_loss(p, b, tape).value()(0, 0) == doctest::Approx(std::log(2.0) + 0.5).epsilon(1e-14));
  CHECK(compute_loss(p, b, tape).value()(0, 0) == doctest::Approx(1.1931).epsilon(1e-4));
  const Predictions perfect = toy_predictions(tape, Tensor::from_rows({{60, -60}}), 1.5);
  CHECK(compute_loss(perfect, b, tape).value()(0, 0) < 1e-6);
}

TEST_CASE("loss agrees with the direct formula") {
  const EventLog log = synthetic("deterministic_spec.json", 30, 3);
  const EncoderSet enc = fit_encoders(log);
  const ModelParams p = init_params(enc, small_config());
  for (const auto& s : MaskStrategy::standard()) {
    const auto gs = graphs_for(log, enc, s);
    const GraphBatch batch = batch_graphs(gs);
    Tape tape;
    const Predictions preds = forward(tape, batch, p);
    CHECK(std::abs(compute_loss(preds, batch, tape).value()(0, 0) - oracle::direct_loss(preds, batch)) < 1e-10);
  }
}

TEST_CASE("batched forward equals per-graph forward") {
  const EventLog log = synthetic("deterministic_spec.json", 6, 5);
  const EncoderSet enc = fit_encoders(log);
  const ModelParams p = init_params(enc, small_config(3));
  const auto gs = graphs_for(log, enc, MaskStrategy::random(0.5));
  std::vector<const HeteroGraph*> reversed;
  for (auto it = gs.rbegin(); it != gs.rend(); ++it) reversed.push_back(&*it);
  const GraphBatch fwd = batch_graphs(gs);
  const GraphBatch rev = batch_graphs(std::span<const HeteroGraph* const>(reversed));
  Tape tape;
  const Predictions all = forward(tape, fwd, p);
  const Predictions back = forward(tape, rev, p);
  for (std::size_t g = 0; g < gs.size(); ++g) {
    const auto single = oracle::predict_rows(gs[g], p);
    for (std::size_t a = 0; a < all.attributes.size(); ++a) {
      for (std::size_t i = 0; i < all.attributes[a].rows.size(); ++i) {
        if (all.attributes[a].graph[i] != g) continue;
        const auto& want = single.at({a, all.attributes[a].event[i]});
        for (std::size_t c = 0; c < want.size(); ++c) CHECK(std::abs(all.attributes[a].output.value()(i, c) - want[c]) < 1e-10);
      }
      for (std::size_t i = 0; i < back.attributes[a].rows.size(); ++i) {
        if (back.attributes[a].graph[i] != gs.size() - 1 - g) continue;
        const auto& want = single.at({a, back.attributes[a].event[i]});
        for (std::size_t c = 0; c < want.size(); ++c) CHECK(std::abs(back.attributes[a].output.value()(i, c) - want[c]) < 1e-10);
      }
    }
  }
}

TEST_CASE("model gradients match finite differences") {
  const EventLog log = synthetic("deterministic_spec.json", 2, 11);
  const EncoderSet enc = fit_encoders(log);
  for (auto agg : {Aggregator::Mean, Aggregator::Sum}) {
    ModelConfig cfg = small_config(2, 4);
    cfg.aggregator = agg;
    ModelParams p = init_params(enc, cfg);
    const auto gs = graphs_for(log, enc, MaskStrategy::odd());
    CHECK(oracle::model_gradient_error(p, batch_graphs(gs)) < 1e-4);
  }
}

TEST_CASE("receptive field is bounded by the layer count") {
  const EventLog log = synthetic("long_lanes_spec.json", 2, 3);
  const EncoderSet enc = fit_encoders(log);
  for (std::size_t k : {1u, 2u, 3u}) {
    const ModelParams p = init_params(enc, small_config(k, 6));
    const HeteroGraph g = build_graph(log.traces[0], apply_mask(log.traces[0].size(), MaskStrategy::window(), 0), enc);
    const auto r = oracle::receptive_field(g, p);
    CHECK(r.probes > 0);
    CHECK(r.outside_change < 1e-9);
    CHECK(r.inside_change > 1e-6);
  }
}

TEST_CASE("repair decoding") {
  CHECK(argmax_excluding_missing(std::vector<double>{0.1, 2.0, 0.3, 5.0}) == 1);
  CHECK(argmax_excluding_missing(std::vector<double>{1.0, 3.0, 3.0, 0.0}) == 1);

  const EventLog log = synthetic("deterministic_spec.json", 10, 2);
  const EncoderSet enc = fit_encoders(log);
  const ModelParams p = init_params(enc, small_config());
  for (std::size_t t = 0; t < log.traces.size(); ++t) {
    const HeteroGraph g = build_graph(log.traces[t], apply_mask(log.traces[t].size(), MaskStrategy::even(), t), enc);
    for (const Repair& r : predict_repair(g, p, enc)) {
      if (const auto* s = std::get_if<std::string>(&r.value)) CHECK(*s != "MISSING VALUE");
    }
  }
}

TEST_CASE("parameter files round-trip") {
  const EventLog log = synthetic("deterministic_spec.json", 10, 2);
  const EncoderSet enc = fit_encoders(log);
  const ModelParams p = init_params(enc, small_config());
  std::stringstream buf;
  write_params(buf, p);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "SGRF");
  std::istringstream in(bytes);
  const ModelParams q = read_params(in, enc);
  CHECK(q.config == p.config);
  for (std::size_t i = 0; i < p.params.size(); ++i) CHECK(q.params[i].value == p.params[i].value);

  std::string broken = bytes;
  broken[0] = 'X';
  std::istringstream bad(broken);
  CHECK_THROWS_AS(read_params(bad, enc), Error);

  const EncoderSet other = fit_encoders(synthetic("long_lanes_spec.json", 4, 1));
  std::istringstream mismatch(bytes);
  try {
    read_params(mismatch, other);
    FAIL("expected SchemaMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaMismatch);
  }
}
