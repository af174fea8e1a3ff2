#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "logrepair/model/hgnn.hpp"

namespace logrepair {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  double weight_decay = 1e-2;
  Aggregator aggregator = Aggregator::Mean;  // overrides ModelConfig::aggregator in training
  std::size_t max_epochs = 50;
  std::size_t patience = 5;  // 0 disables early stopping
  std::uint64_t seed = 123;
  double random_p = 0.5;     // probability of the RANDOM strategy

  void validate() const;  // throws InvalidConfig
};

/// Ranges of the hyperparameter search.
struct SearchSpace {
  double min_learning_rate = 1e-4;
  double max_learning_rate = 1e-1;
  std::vector<std::size_t> batch_sizes{16, 64, 256, 512, 1024, 2048};
  double min_weight_decay = 1e-2;
  double max_weight_decay = 1e-1;
  std::vector<Aggregator> aggregators{Aggregator::Sum, Aggregator::Mean, Aggregator::Max};
};

nlohmann::json train_config_to_json(const TrainConfig& cfg);
/// Missing keys keep the defaults of `base`.
TrainConfig train_config_from_json(const nlohmann::json& j, const TrainConfig& base = {});
nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j, const ModelConfig& base = {});

}  // namespace logrepair
