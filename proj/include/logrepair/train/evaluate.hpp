#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "logrepair/graph/encoders.hpp"
#include "logrepair/graph/mask.hpp"
#include "logrepair/log/split.hpp"
#include "logrepair/model/hgnn.hpp"
#include "logrepair/train/trainer.hpp"

namespace logrepair {

enum class MetricKind { Accuracy, Mae };

const char* to_string(MetricKind m);

/// Raw tallies for one attribute under one strategy and one model.
struct AttributeScore {
  MetricKind metric = MetricKind::Accuracy;
  std::size_t count = 0;    // masked nodes with a known target
  std::size_t correct = 0;  // accuracy
  double abs_error = 0.0;   // MAE, normalized space
  double raw_abs_error = 0.0;  // MAE, raw units (seconds for timestamps)

  /// Accuracy or normalized MAE; nullopt when count is 0.
  std::optional<double> value() const;
  std::optional<double> raw_value() const;
};

/// Scores of one trained model on `test` masked by `strategy`. Masks use
/// per-trace seeds derived from `mask_seed`.
std::vector<AttributeScore> evaluate_model(const EventLog& test, const ModelParams& params, const EncoderSet& enc,
                                           const MaskStrategy& strategy, std::uint64_t mask_seed,
                                           std::size_t batch_size = 256);

struct MetricSummary {
  std::string attribute;
  MetricKind metric = MetricKind::Accuracy;
  std::optional<double> mean;             // over runs that had targets
  double std = 0.0;                       // population std over the same runs
  std::vector<std::optional<double>> runs;
  std::size_t count = 0;                  // scored nodes, summed over runs
  std::optional<double> raw_mae;          // numeric attributes only
};

struct StrategyReport {
  std::string strategy;
  std::vector<MetricSummary> attributes;  // schema order
};

struct RunReport {
  std::vector<StrategyReport> strategies;            // odd, even, window, random
  std::vector<std::vector<EpochRecord>> histories;   // per run
  std::vector<std::size_t> best_epochs;
  double wall_seconds = 0.0;

  std::size_t row_count() const;
  const MetricSummary* find(std::string_view strategy, std::string_view attribute) const;
};

struct MultiRunOptions {
  std::size_t n_runs = 10;
  bool parallel = false;  // runs train concurrently when true
  std::size_t eval_batch_size = 256;
};

/// Trains `n_runs` models (run r uses seed base + r for both the training
/// loop and initialization, base = cfg.seed), scores each on the test split
/// under every standard strategy, and summarizes. Test masks are the same for
/// every run. Encoders must be fitted on splits.train.
RunReport evaluate_multi_run(const LogSplits& splits, const EncoderSet& enc, const TrainConfig& cfg,
                             const ModelConfig& model_cfg, const MultiRunOptions& options = {});

/// Summaries from per-run scores; `scores[run][strategy][attribute]`.
RunReport summarize_runs(const std::vector<std::vector<std::vector<AttributeScore>>>& scores,
                         const std::vector<MaskStrategy>& strategies, const EncoderSet& enc);

/// `{strategy: {attribute: {metric, mean, std, runs, count[, raw_mae]}}}`.
/// Wall-clock time is left out so deterministic runs produce identical
/// documents.
nlohmann::json report_to_json(const RunReport& report);

}  // namespace logrepair
