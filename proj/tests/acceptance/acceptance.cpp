// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "logrepair/cli/cli.hpp"
#include "logrepair/log/csv.hpp"
#include "logrepair/log/schema_io.hpp"
#include "logrepair/log/split.hpp"
#include "logrepair/log/synthetic.hpp"
#include "logrepair/random.hpp"
#include "logrepair/train/evaluate.hpp"
#include "logrepair/train/trainer.hpp"
#include "oracles.hpp"

using namespace logrepair;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ProcessSpec load_spec(const char* name) {
  return process_spec_from_json(nlohmann::json::parse(oracle::slurp(oracle::bundled_path(name))));
}

Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  Tensor t(r, c);
  for (auto& x : t.values()) x = d(rng);
  return t;
}

double op_grad_error(Parameter& p, const std::function<Var(Tape&, Var)>& build) {
  p.zero_grad();
  {
    Tape tape;
    tape.backward(build(tape, tape.param(p)));
  }
  auto value = [&] {
    Tape tape;
    return build(tape, tape.constant(p.value)).value()(0, 0);
  };
  const Tensor numeric = oracle::numeric_gradient(p.value, value, 1e-6);
  double worst = 0;
  for (std::size_t i = 0; i < numeric.size(); ++i)
    worst = std::max(worst, oracle::rel_err(p.grad.data()[i], numeric.data()[i], 1e-5));
  return worst;
}

std::vector<HeteroGraph> masked_graphs(const EventLog& log, const EncoderSet& enc, const MaskStrategy& s, std::uint64_t seed) {
  return expand_with_masks(log, enc, std::span<const MaskStrategy>(&s, 1), seed);
}

// 1. Gradient correctness.
Outcome gradients() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor w = random_tensor(4, 3, rng), other = random_tensor(5, 4, rng), row = random_tensor(1, 4, rng);
    const Tensor target = random_tensor(6, 3, rng);
    const std::vector<std::int32_t> cls5{0, 3, 1, 2, 3}, cls4{2, 0, 1, 1};
    const std::vector<std::uint32_t> picks{4, 0, 2, 2, 1, 3};
    const Groups groups = Groups::from_lists({{0, 3}, {}, {1, 2, 4}, {4}});
    Parameter p(random_tensor(5, 4, rng), 0, "p");
    Parameter b(random_tensor(1, 4, rng), 1, "b");
    worst = std::max(worst, op_grad_error(p, [&](Tape& t, Var x) { return sum(matmul(x, t.constant(w))); }));
    worst = std::max(worst, op_grad_error(p, [&](Tape& t, Var x) { return softmax_cross_entropy(add(x, t.constant(other)), cls5); }));
    worst = std::max(worst, op_grad_error(b, [&](Tape& t, Var x) { return softmax_cross_entropy(add(t.constant(other), x), cls5); }));
    worst = std::max(worst, op_grad_error(p, [&](Tape& t, Var x) { return softmax_cross_entropy(relu(add(x, t.constant(row))), cls5); }));
    worst = std::max(worst, op_grad_error(p, [&](Tape&, Var x) { return softmax_cross_entropy(x, cls5); }));
    worst = std::max(worst, op_grad_error(p, [&](Tape& t, Var x) { return l1_loss(matmul(gather_rows(x, picks), t.constant(w)), target); }));
    for (auto mode : {Aggregator::Sum, Aggregator::Mean, Aggregator::Max})
      worst = std::max(worst, op_grad_error(p, [&](Tape&, Var x) { return softmax_cross_entropy(segment_aggregate(x, groups, mode), cls4); }));
  }

  const EventLog log = generate_synthetic_log(load_spec("deterministic_spec.json"), 2, 77);
  const EncoderSet enc = fit_encoders(log);
  double model_worst = 0;
  for (auto agg : {Aggregator::Sum, Aggregator::Mean}) {
    for (const auto& s : {MaskStrategy::odd(), MaskStrategy::window()}) {
      ModelConfig cfg;
      cfg.hidden_size = 6;
      cfg.layers = 2;
      cfg.aggregator = agg;
      cfg.seed = 5;
      ModelParams params = init_params(enc, cfg);
      const auto gs = masked_graphs(log, enc, s, 3);
      model_worst = std::max(model_worst, oracle::model_gradient_error(params, batch_graphs(gs)));
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && model_worst < 1e-4 && secs < 60,
          "ops worst rel err " + fmt("%.2e", worst) + ", model worst rel err " + fmt("%.2e", model_worst) + ", " +
              fmt("%.1f s", secs)};
}

// 2. Construction counts on the 3-event, 3-attribute trace.
Outcome construction() {
  const AttributeSchema s = schema_from_json(nlohmann::json::parse(
      R"({"attributes":[{"name":"activity"},{"name":"timestamp","kind":"timestamp"},{"name":"resource"}]})"));
  std::istringstream in(
      "case_id,activity,timestamp,resource\n"
      "1,register,2020-01-01 08:00:00,ann\n"
      "1,check,2020-01-01 08:05:00,bob\n"
      "1,approve,2020-01-01 08:30:00,ann\n");
  const EventLog log = parse_csv_log(in, s);
  const EncoderSet enc = fit_encoders(log);
  const HeteroGraph g = build_graph(log.traces[0], EventMask(3, false), enc);
  std::size_t forward = 0;
  const auto rels = relation_types(s);
  for (std::size_t r = 0; r < rels.size(); ++r)
    if (!rels[r].reverse()) forward += g.edges[r].size();
  return {g.node_count() == 9 && g.edge_count() == 24 && forward == 12,
          std::to_string(g.node_count()) + " nodes, " + std::to_string(g.edge_count()) + " edges (" +
              std::to_string(forward) + " forward)"};
}

// 3. Loss formula oracle on 100 random batches.
Outcome loss_oracle() {
  const EventLog log = generate_synthetic_log(load_spec("deterministic_spec.json"), 60, 31);
  const EncoderSet enc = fit_encoders(log);
  std::mt19937_64 rng(31);
  const auto strategies = MaskStrategy::standard();
  double worst = 0;
  for (int b = 0; b < 100; ++b) {
    ModelConfig cfg;
    cfg.hidden_size = 8 + b % 9;
    cfg.layers = 1 + b % 3;
    cfg.aggregator = static_cast<Aggregator>(b % 3);
    cfg.seed = static_cast<std::uint64_t>(b);
    const ModelParams params = init_params(enc, cfg);
    std::vector<HeteroGraph> gs;
    const std::size_t n = 1 + rng() % 12;
    for (std::size_t i = 0; i < n; ++i) {
      const Trace& t = log.traces[rng() % log.traces.size()];
      gs.push_back(build_graph(t, apply_mask(t.size(), strategies[rng() % 4], rng()), enc));
    }
    const GraphBatch batch = batch_graphs(gs);
    Tape tape;
    const Predictions preds = forward(tape, batch, params);
    worst = std::max(worst, std::abs(compute_loss(preds, batch, tape).value()(0, 0) - oracle::direct_loss(preds, batch)));
  }
  return {worst < 1e-10, "max |difference| " + fmt("%.2e", worst) + " over 100 batches"};
}

double masked_activity_accuracy(const std::vector<HeteroGraph>& gs, const ModelParams& params) {
  const GraphBatch batch = batch_graphs(gs);
  Tape tape;
  const Predictions preds = forward(tape, batch, params);
  const auto& ap = preds.attributes[0];
  std::size_t hit = 0, n = 0;
  for (std::size_t i = 0; i < ap.rows.size(); ++i) {
    if (!batch.nodes[0].has_target[ap.rows[i]]) continue;
    ++n;
    hit += static_cast<std::int32_t>(argmax_excluding_missing(ap.output.value().row(i))) == batch.nodes[0].target_class[ap.rows[i]];
  }
  return n ? static_cast<double>(hit) / static_cast<double>(n) : 0.0;
}

// 4. Overfit smoke run. Two constant-rate phases of 100 epochs each: the
// high rate reaches the timestamp scale quickly, the low rate settles the
// L1 term. With two layers the middle of longer RANDOM runs is too far from
// any unmasked event to fit within the budget.
Outcome overfit() {
  const auto t0 = Clock::now();
  const std::uint64_t seed = 123;
  EventLog log = generate_synthetic_log(load_spec("deterministic_spec.json"), 10, seed);
  log.split = SplitTag::Train;
  const EncoderSet enc = fit_encoders(log);
  const auto gs = expand_with_masks(log, enc, MaskStrategy::standard(), seed);
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.weight_decay = 0.0;
  cfg.patience = 0;
  cfg.max_epochs = 100;
  cfg.seed = seed;
  ModelConfig mc;
  mc.hidden_size = 64;
  mc.layers = 3;
  mc.seed = seed;
  ModelParams params = init_params(enc, mc);
  std::size_t epochs = 0;
  for (double lr : {1e-2, 1e-3}) {
    cfg.learning_rate = lr;
    TrainResult r = train_on_graphs(gs, gs, std::move(params), cfg);
    epochs += r.history.size();
    params = std::move(r.params);
  }
  const double loss = evaluate_loss(gs, params, gs.size());
  const double acc = masked_activity_accuracy(gs, params);
  const double secs = seconds_since(t0);
  return {loss < 0.05 && acc == 1.0 && epochs <= 200 && secs < 120,
          "training loss " + fmt("%.4f", loss) + ", masked activity accuracy " + fmt("%.3f", acc) + ", " +
              std::to_string(epochs) + " epochs, " + fmt("%.1f s", secs)};
}

// 5. Deterministic-log calibration.
Outcome calibration() {
  const auto t0 = Clock::now();
  const EventLog log = generate_synthetic_log(load_spec("deterministic_spec.json"), 2000, 123);
  const LogSplits splits = split_log(log, {0.6, 0.2, 0.2}, 123);
  const EncoderSet enc = fit_encoders(splits.train);
  TrainConfig cfg;
  ModelConfig mc;
  mc.hidden_size = 64;
  mc.layers = 2;
  MultiRunOptions opt;
  opt.n_runs = 3;
  const RunReport rep = evaluate_multi_run(splits, enc, cfg, mc, opt);
  const double even = rep.find("even", "activity")->mean.value_or(0);
  const double odd = rep.find("odd", "activity")->mean.value_or(0);
  const double secs = seconds_since(t0);
  return {even >= 0.95 && odd >= 0.95 && secs < 900,
          "EVEN activity accuracy " + fmt("%.4f", even) + ", ODD " + fmt("%.4f", odd) + " (mean of 3 runs), " +
              fmt("%.1f s", secs)};
}

// 6. Depth effect under RANDOM(0.5).
Outcome depth() {
  const auto t0 = Clock::now();
  const EventLog log = generate_synthetic_log(load_spec("long_lanes_spec.json"), 500, 321);
  const LogSplits splits = split_log(log, {0.6, 0.2, 0.2}, 321);
  const EncoderSet enc = fit_encoders(splits.train);

  TrainConfig cfg;
  cfg.learning_rate = 3e-3;
  cfg.seed = 500;
  const MaskStrategy random = MaskStrategy::random(cfg.random_p);
  std::size_t longest = 0;
  const std::uint64_t test_seed = derive_seed(cfg.seed, 0x7e57);
  for (std::size_t t = 0; t < splits.test.traces.size(); ++t)
    longest = std::max(longest, max_missing_run(apply_mask(splits.test.traces[t].size(), random, derive_seed(test_seed, t))));

  MultiRunOptions opt;
  opt.n_runs = 5;
  double acc[2] = {0, 0};
  const std::size_t depths[2] = {2, 4};
  for (int d = 0; d < 2; ++d) {
    ModelConfig mc;
    mc.hidden_size = 32;
    mc.layers = depths[d];
    const RunReport rep = evaluate_multi_run(splits, enc, cfg, mc, opt);
    acc[d] = rep.find("random", "activity")->mean.value_or(0);
  }
  const double secs = seconds_since(t0);
  return {acc[1] > acc[0] && longest > 4,
          "RANDOM activity accuracy K=2 " + fmt("%.4f", acc[0]) + ", K=4 " + fmt("%.4f", acc[1]) +
              " (5 paired runs), longest empty run " + std::to_string(longest) + ", " + fmt("%.1f s", secs)};
}

// 7. Receptive-field bound.
Outcome receptive() {
  const EventLog log = generate_synthetic_log(load_spec("long_lanes_spec.json"), 6, 9);
  const EncoderSet enc = fit_encoders(log);
  double outside = 0, inside = 1e300;
  std::size_t probes = 0;
  for (std::size_t k : {1u, 2u, 3u}) {
    ModelConfig mc;
    mc.hidden_size = 16;
    mc.layers = k;
    mc.seed = 40 + k;
    const ModelParams params = init_params(enc, mc);
    double inside_k = 0;
    for (const auto& s : MaskStrategy::standard()) {
      for (const auto& g : masked_graphs(log, enc, s, 9)) {
        const auto r = oracle::receptive_field(g, params);
        outside = std::max(outside, r.outside_change);
        inside_k = std::max(inside_k, r.inside_change);
        probes += r.probes;
      }
    }
    inside = std::min(inside, inside_k);
  }
  return {outside < 1e-9 && probes > 0 && inside > 1e-6,
          "max change beyond K hops " + fmt("%.2e", outside) + " over " + std::to_string(probes) +
              " masked nodes (K=1,2,3); change at exactly K hops " + fmt("%.2e", inside)};
}

// 8. Masking determinism and complementarity.
Outcome masking() {
  bool ok = true;
  for (std::size_t len = 1; len <= 64; ++len) {
    const EventMask o = apply_mask(len, MaskStrategy::odd(), 1), e = apply_mask(len, MaskStrategy::even(), 1);
    for (std::size_t i = 0; i < len; ++i) ok = ok && (o[i] != e[i]);
    ok = ok && o == apply_mask(len, MaskStrategy::odd(), 99);
  }
  const EventMask r = apply_mask(10000, MaskStrategy::random(0.5), 123);
  ok = ok && r == apply_mask(10000, MaskStrategy::random(0.5), 123);
  const double frac = static_cast<double>(std::count(r.begin(), r.end(), true)) / 10000.0;
  return {ok && frac >= 0.48 && frac <= 0.52,
          std::string("ODD/EVEN partition ") + (ok ? "holds" : "broken") + " for lengths 1..64, RANDOM(0.5) fraction " +
              fmt("%.4f", frac)};
}

// 9. Pipeline round trip through the CLI.
Outcome pipeline() {
  const fs::path dir = fs::temp_directory_path() / "logrepair_acceptance_pipeline";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string log = (dir / "log.csv").string(), damaged = (dir / "damaged.csv").string(),
                    art = (dir / "artifacts").string(), repaired = (dir / "repaired.csv").string();
  std::ostringstream out, err;
  auto run = [&](std::vector<std::string> args) { return cli::run(args, out, err); };
  int code = run({"generate", oracle::bundled_path("deterministic_spec.json"), log, "--traces", "300"});
  if (code == 0) code = run({"mask", log, damaged, "--strategy", "random"});
  if (code == 0) code = run({"train", log, art, "--hidden", "32"});
  if (code == 0) code = run({"repair", damaged, art, repaired});
  if (code != 0) return {false, "CLI failed: " + err.str()};

  std::istringstream din(oracle::slurp(damaged)), rin(oracle::slurp(repaired));
  const CsvTable before = read_csv_table(din), after = read_csv_table(rin);
  bool same_shape = before.header == after.header && before.rows.size() == after.rows.size();
  std::size_t preserved = 0, changed = 0, dashes = 0, filled = 0;
  for (std::size_t i = 0; same_shape && i < before.rows.size(); ++i)
    for (std::size_t c = 0; c < before.header.size(); ++c) {
      const std::string& b = before.rows[i][c];
      const std::string& a = after.rows[i][c];
      if (a == "-") ++dashes;
      if (b == "-") {
        ++filled;
      } else if (a == b) {
        ++preserved;
      } else {
        ++changed;
      }
    }
  return {same_shape && changed == 0 && dashes == 0 && filled > 0,
          std::to_string(preserved) + " present cells identical, " + std::to_string(changed) + " altered, " +
              std::to_string(filled) + " filled, " + std::to_string(dashes) + " '-' tokens remain"};
}

// 10. Multi-run reporting.
Outcome reporting() {
  const EventLog log = generate_synthetic_log(load_spec("deterministic_spec.json"), 100, 10);
  const LogSplits splits = split_log(log, {0.6, 0.2, 0.2}, 10);
  const EncoderSet enc = fit_encoders(splits.train);
  TrainConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.max_epochs = 10;
  ModelConfig mc;
  mc.hidden_size = 16;
  MultiRunOptions opt;
  opt.n_runs = 10;
  const RunReport rep = evaluate_multi_run(splits, enc, cfg, mc, opt);
  const nlohmann::json j = report_to_json(rep);
  bool ok = rep.row_count() == 4 * enc.attributes.size() && j.size() == 4 && rep.histories.size() == 10;
  std::size_t entries = 0;
  for (const auto& [strategy, attrs] : j.items()) {
    ok = ok && attrs.size() == enc.attributes.size();
    for (const auto& [name, m] : attrs.items()) {
      ++entries;
      ok = ok && m.at("std").get<double>() >= 0 && m.at("runs").size() == 10 && !m.at("mean").is_null();
      if (m.at("metric") == "accuracy") {
        const double mean = m.at("mean").get<double>();
        ok = ok && mean >= 0 && mean <= 1;
      }
    }
  }
  return {ok, std::to_string(entries) + " strategy x attribute entries (4 x " + std::to_string(enc.attributes.size()) +
                  ") from 10 runs, all std >= 0"};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {1, "gradient correctness", gradients},   {2, "construction counts", construction},
      {3, "loss formula oracle", loss_oracle},  {4, "overfit smoke", overfit},
      {5, "deterministic-log calibration", calibration}, {6, "depth effect", depth},
      {7, "receptive-field bound", receptive},  {8, "masking determinism", masking},
      {9, "pipeline round trip", pipeline},     {10, "multi-run reporting", reporting},
  };
  // Optional criterion ids on the command line select a subset.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name << "): " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
