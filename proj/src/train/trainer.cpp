#include "logrepair/train/trainer.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>

#include "logrepair/error.hpp"
#include "logrepair/random.hpp"
#include "logrepair/train/adam.hpp"

namespace logrepair {

bool EarlyStopping::update(double val_loss) {
  ++epochs_;
  if (val_loss < best_) {
    best_ = val_loss;
    best_epoch_ = epochs_;
    stale_ = 0;
    return true;
  }
  ++stale_;
  return false;
}

std::vector<HeteroGraph> expand_with_masks(const EventLog& log, const EncoderSet& enc,
                                           std::span<const MaskStrategy> strategies, std::uint64_t seed) {
  std::vector<HeteroGraph> out;
  out.reserve(log.traces.size() * strategies.size());
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    for (std::size_t t = 0; t < log.traces.size(); ++t) {
      const Trace& trace = log.traces[t];
      const EventMask mask = apply_mask(trace.size(), strategies[s], derive_seed(seed, t));
      out.push_back(build_graph(trace, mask, enc));
    }
  }
  return out;
}

double evaluate_loss(std::span<const HeteroGraph> graphs, const ModelParams& params, std::size_t batch_size) {
  if (graphs.empty()) return 0.0;
  double total = 0.0;
  std::size_t batches = 0;
  for (std::size_t lo = 0; lo < graphs.size(); lo += batch_size) {
    const std::size_t hi = std::min(graphs.size(), lo + batch_size);
    const GraphBatch batch = batch_graphs(graphs.subspan(lo, hi - lo));
    Tape tape;
    const Predictions preds = forward(tape, batch, params);
    total += compute_loss(preds, batch, tape).value()(0, 0);
    ++batches;
  }
  return total / static_cast<double>(batches);
}

TrainResult train_on_graphs(std::span<const HeteroGraph> train, std::span<const HeteroGraph> validation,
                            ModelParams init, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train.empty()) throw Error(ErrorCode::EmptyLog, "no training graphs");
  TrainResult result;
  ModelParams params = std::move(init);
  params.zero_grad();
  AdamState adam;
  EarlyStopping stopper(cfg.patience);
  Rng rng(derive_seed(cfg.seed, 0x7a1b));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<const HeteroGraph*> members;
  std::vector<Tensor> best_values;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size) {
      const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
      members.clear();
      for (std::size_t i = lo; i < hi; ++i) members.push_back(&train[order[i]]);
      const GraphBatch batch = batch_graphs(std::span<const HeteroGraph* const>(members));
      Tape tape;
      const Predictions preds = forward(tape, batch, params);
      const Var loss = compute_loss(preds, batch, tape);
      const double value = loss.value()(0, 0);
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonFiniteLoss, "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batches));
      }
      tape.backward(loss);
      adam_step(params.params, adam, cfg.learning_rate, cfg.weight_decay);
      epoch_loss += value;
      ++batches;
    }
    EpochRecord rec{epoch, epoch_loss / static_cast<double>(batches),
                    validation.empty() ? epoch_loss / static_cast<double>(batches)
                                       : evaluate_loss(validation, params, cfg.batch_size)};
    if (!std::isfinite(rec.val_loss)) {
      throw Error(ErrorCode::NonFiniteLoss, "validation loss at epoch " + std::to_string(epoch));
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (stopper.update(rec.val_loss)) {
      best_values.clear();
      for (const auto& p : params.params) best_values.push_back(p.value);
    }
    if (stopper.should_stop()) break;
  }

  for (std::size_t i = 0; i < params.params.size(); ++i) params.params[i].value = best_values[i];
  result.params = std::move(params);
  result.best_epoch = stopper.best_epoch();
  result.best_val_loss = stopper.best_loss();
  return result;
}

TrainResult train_model(const EventLog& train, const EventLog& validation, const EncoderSet& enc,
                        const TrainConfig& cfg, const ModelConfig& model_cfg, const EpochCallback& on_epoch) {
  if (train.split == SplitTag::Test || validation.split == SplitTag::Test) {
    throw Error(ErrorCode::SplitLeak, "training was handed the test split");
  }
  if (train.traces.empty() || validation.traces.empty()) {
    throw Error(ErrorCode::EmptyLog, "training and validation splits must be non-empty");
  }
  cfg.validate();
  ModelConfig mc = model_cfg;
  mc.aggregator = cfg.aggregator;
  const auto strategies = MaskStrategy::standard(cfg.random_p);
  const auto train_graphs = expand_with_masks(train, enc, strategies, derive_seed(cfg.seed, 1));
  const auto val_graphs = expand_with_masks(validation, enc, strategies, derive_seed(cfg.seed, 2));
  return train_on_graphs(train_graphs, val_graphs, init_params(enc, mc), cfg, on_epoch);
}

void write_history_csv(std::ostream& out, std::span<const EpochRecord> history) {
  auto num = [](double v) {
    char buf[64];
    return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
  };
  out << "epoch,train_loss,val_loss\n";
  for (const auto& r : history) out << r.epoch << ',' << num(r.train_loss) << ',' << num(r.val_loss) << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing history");
}

}  // namespace logrepair
