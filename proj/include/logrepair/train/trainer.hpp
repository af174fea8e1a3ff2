#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "logrepair/graph/hetero_graph.hpp"
#include "logrepair/graph/mask.hpp"
#include "logrepair/log/event_log.hpp"
#include "logrepair/train/config.hpp"

namespace logrepair {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ModelParams params;             // from the best validation epoch
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_loss = std::numeric_limits<double>::infinity();
};

/// Patience counter over validation losses. Only a strict decrease counts
/// as improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  /// Feed the loss of the next epoch; returns true if it is a new best.
  bool update(double val_loss);
  bool should_stop() const noexcept { return patience_ > 0 && stale_ >= patience_; }
  std::size_t best_epoch() const noexcept { return best_epoch_; }
  double best_loss() const noexcept { return best_; }

 private:
  std::size_t patience_;
  std::size_t epochs_ = 0;
  std::size_t stale_ = 0;
  std::size_t best_epoch_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

/// One graph per (trace, strategy), strategies outermost. RANDOM masks use
/// a per-trace seed derived from `seed`.
std::vector<HeteroGraph> expand_with_masks(const EventLog& log, const EncoderSet& enc,
                                           std::span<const MaskStrategy> strategies, std::uint64_t seed);

/// Loss averaged over consecutive batches of `batch_size` graphs.
double evaluate_loss(std::span<const HeteroGraph> graphs, const ModelParams& params, std::size_t batch_size);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Trains on the four-strategy expansion of `train`, early-stopping on the
/// expansion of `validation`. Throws SplitLeak if either log is tagged as a
/// test split, NonFiniteLoss if a batch loss diverges.
TrainResult train_model(const EventLog& train, const EventLog& validation, const EncoderSet& enc,
                        const TrainConfig& cfg, const ModelConfig& model_cfg, const EpochCallback& on_epoch = {});

/// Same loop on pre-built graphs; `init` is the starting point.
TrainResult train_on_graphs(std::span<const HeteroGraph> train, std::span<const HeteroGraph> validation,
                            ModelParams init, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

/// "epoch,train_loss,val_loss" rows.
void write_history_csv(std::ostream& out, std::span<const EpochRecord> history);

}  // namespace logrepair
