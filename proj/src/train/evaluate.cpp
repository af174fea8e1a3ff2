#include "logrepair/train/evaluate.hpp"

#include <chrono>
#include <cmath>
#include <future>

#include "logrepair/error.hpp"
#include "logrepair/random.hpp"

namespace logrepair {

namespace {

constexpr std::uint64_t kTestMaskTag = 0x7e57;

struct MeanStd {
  std::optional<double> mean;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<std::optional<double>>& xs) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& x : xs) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  if (n == 0) return {};
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (const auto& x : xs) {
    if (x) sq += (*x - mean) * (*x - mean);
  }
  return {mean, std::sqrt(sq / static_cast<double>(n))};
}

}  // namespace

const char* to_string(MetricKind m) { return m == MetricKind::Accuracy ? "accuracy" : "mae"; }

std::optional<double> AttributeScore::value() const {
  if (count == 0) return std::nullopt;
  const double n = static_cast<double>(count);
  return metric == MetricKind::Accuracy ? static_cast<double>(correct) / n : abs_error / n;
}

std::optional<double> AttributeScore::raw_value() const {
  if (count == 0 || metric == MetricKind::Accuracy) return std::nullopt;
  return raw_abs_error / static_cast<double>(count);
}

std::vector<AttributeScore> evaluate_model(const EventLog& test, const ModelParams& params, const EncoderSet& enc,
                                           const MaskStrategy& strategy, std::uint64_t mask_seed,
                                           std::size_t batch_size) {
  if (batch_size == 0) throw Error(ErrorCode::InvalidConfig, "evaluation batch size must be positive");
  std::vector<AttributeScore> scores(enc.attributes.size());
  for (std::size_t a = 0; a < scores.size(); ++a) {
    scores[a].metric = enc.attributes[a].categorical() ? MetricKind::Accuracy : MetricKind::Mae;
  }
  const auto graphs = expand_with_masks(test, enc, std::span<const MaskStrategy>(&strategy, 1), mask_seed);
  for (std::size_t lo = 0; lo < graphs.size(); lo += batch_size) {
    const std::size_t hi = std::min(graphs.size(), lo + batch_size);
    const GraphBatch batch = batch_graphs(std::span<const HeteroGraph>(graphs).subspan(lo, hi - lo));
    Tape tape;
    const Predictions preds = forward(tape, batch, params);
    for (std::size_t a = 0; a < preds.attributes.size(); ++a) {
      const AttributePredictions& ap = preds.attributes[a];
      const NodeTable& nodes = batch.nodes[a];
      const AttributeEncoder& e = enc.attributes[a];
      const Tensor& out = ap.output.value();
      AttributeScore& s = scores[a];
      for (std::size_t i = 0; i < ap.rows.size(); ++i) {
        const std::uint32_t row = ap.rows[i];
        if (!nodes.has_target[row]) continue;
        ++s.count;
        if (e.categorical()) {
          const auto cls = argmax_excluding_missing(out.row(i));
          s.correct += static_cast<std::int32_t>(cls) == nodes.target_class[row] ? 1 : 0;
        } else {
          const double pred = out(i, 0);
          const double truth = nodes.target_value[row];
          s.abs_error += std::abs(pred - truth);
          s.raw_abs_error += std::abs(inverse_transform(pred, e) - inverse_transform(truth, e));
        }
      }
    }
  }
  return scores;
}

RunReport summarize_runs(const std::vector<std::vector<std::vector<AttributeScore>>>& scores,
                         const std::vector<MaskStrategy>& strategies, const EncoderSet& enc) {
  RunReport report;
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    StrategyReport sr{strategies[s].name(), {}};
    for (std::size_t a = 0; a < enc.attributes.size(); ++a) {
      MetricSummary m;
      m.attribute = enc.attributes[a].name;
      m.metric = enc.attributes[a].categorical() ? MetricKind::Accuracy : MetricKind::Mae;
      std::vector<std::optional<double>> raw;
      for (const auto& run : scores) {
        const AttributeScore& sc = run.at(s).at(a);
        m.runs.push_back(sc.value());
        raw.push_back(sc.raw_value());
        m.count += sc.count;
      }
      const MeanStd ms = mean_std(m.runs);
      m.mean = ms.mean;
      m.std = ms.std;
      if (m.metric == MetricKind::Mae) m.raw_mae = mean_std(raw).mean;
      sr.attributes.push_back(std::move(m));
    }
    report.strategies.push_back(std::move(sr));
  }
  return report;
}

RunReport evaluate_multi_run(const LogSplits& splits, const EncoderSet& enc, const TrainConfig& cfg,
                             const ModelConfig& model_cfg, const MultiRunOptions& options) {
  if (options.n_runs == 0) throw Error(ErrorCode::InvalidConfig, "n_runs must be at least 1");
  if (splits.test.traces.empty()) throw Error(ErrorCode::EmptyEvaluationSet, "test split is empty");
  cfg.validate();
  model_cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  const auto strategies = MaskStrategy::standard(cfg.random_p);
  const std::uint64_t test_seed = derive_seed(cfg.seed, kTestMaskTag);

  struct RunOutput {
    std::vector<std::vector<AttributeScore>> scores;
    TrainResult trained;
  };
  auto one_run = [&](std::size_t r) {
    TrainConfig rc = cfg;
    rc.seed = cfg.seed + r;
    ModelConfig mc = model_cfg;
    mc.seed = cfg.seed + r;
    try {
      RunOutput out;
      out.trained = train_model(splits.train, splits.validation, enc, rc, mc);
      for (const auto& s : strategies) {
        out.scores.push_back(evaluate_model(splits.test, out.trained.params, enc, s, test_seed,
                                            options.eval_batch_size));
      }
      return out;
    } catch (const Error& e) {
      throw Error(e.code(), "run " + std::to_string(r) + ": " + e.what());
    }
  };

  std::vector<RunOutput> outputs;
  if (options.parallel && options.n_runs > 1) {
    std::vector<std::future<RunOutput>> futures;
    for (std::size_t r = 0; r < options.n_runs; ++r) futures.push_back(std::async(std::launch::async, one_run, r));
    for (auto& f : futures) outputs.push_back(f.get());
  } else {
    for (std::size_t r = 0; r < options.n_runs; ++r) outputs.push_back(one_run(r));
  }

  std::vector<std::vector<std::vector<AttributeScore>>> scores;
  for (const auto& o : outputs) scores.push_back(o.scores);
  RunReport report = summarize_runs(scores, strategies, enc);
  for (auto& o : outputs) {
    report.histories.push_back(o.trained.history);
    report.best_epochs.push_back(o.trained.best_epoch);
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

std::size_t RunReport::row_count() const {
  std::size_t n = 0;
  for (const auto& s : strategies) n += s.attributes.size();
  return n;
}

const MetricSummary* RunReport::find(std::string_view strategy, std::string_view attribute) const {
  for (const auto& s : strategies) {
    if (s.strategy != strategy) continue;
    for (const auto& m : s.attributes) {
      if (m.attribute == attribute) return &m;
    }
  }
  return nullptr;
}

nlohmann::json report_to_json(const RunReport& report) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json j = nlohmann::json::object();
  for (const auto& s : report.strategies) {
    nlohmann::json attrs = nlohmann::json::object();
    for (const auto& m : s.attributes) {
      nlohmann::json runs = nlohmann::json::array();
      for (const auto& r : m.runs) runs.push_back(opt(r));
      nlohmann::json entry{{"metric", to_string(m.metric)}, {"mean", opt(m.mean)}, {"std", m.std},
                           {"runs", std::move(runs)},       {"count", m.count}};
      if (m.metric == MetricKind::Mae) entry["raw_mae"] = opt(m.raw_mae);
      attrs[m.attribute] = std::move(entry);
    }
    j[s.strategy] = std::move(attrs);
  }
  return j;
}

}  // namespace logrepair
