#include "logrepair/train/config.hpp"

#include <cmath>

#include "logrepair/error.hpp"

namespace logrepair {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::InvalidConfig, "learning rate must be positive");
  }
  if (batch_size < 1) throw Error(ErrorCode::InvalidConfig, "batch size must be >= 1");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw Error(ErrorCode::InvalidConfig, "weight decay must be non-negative");
  }
  if (max_epochs < 1) throw Error(ErrorCode::InvalidConfig, "max epochs must be >= 1");
  if (!(random_p > 0.0 && random_p < 1.0)) throw Error(ErrorCode::InvalidConfig, "random p must lie in (0,1)");
}

nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size}, {"weight_decay", c.weight_decay},
          {"aggregator", to_string(c.aggregator)}, {"max_epochs", c.max_epochs}, {"patience", c.patience},
          {"seed", c.seed}, {"random_p", c.random_p}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, const TrainConfig& base) {
  try {
    TrainConfig c = base;
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    if (j.contains("aggregator")) c.aggregator = parse_aggregator(j.at("aggregator").get<std::string>());
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.patience = j.value("patience", c.patience);
    c.seed = j.value("seed", c.seed);
    c.random_p = j.value("random_p", c.random_p);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("train config: ") + e.what());
  }
}

nlohmann::json model_config_to_json(const ModelConfig& c) {
  return {{"hidden_size", c.hidden_size}, {"layers", c.layers}, {"aggregator", to_string(c.aggregator)},
          {"seed", c.seed}};
}

ModelConfig model_config_from_json(const nlohmann::json& j, const ModelConfig& base) {
  try {
    ModelConfig c = base;
    c.hidden_size = j.value("hidden_size", c.hidden_size);
    c.layers = j.value("layers", c.layers);
    if (j.contains("aggregator")) c.aggregator = parse_aggregator(j.at("aggregator").get<std::string>());
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("model config: ") + e.what());
  }
}

}  // namespace logrepair
