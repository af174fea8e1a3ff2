#include "logrepair/train/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logrepair/error.hpp"

namespace logrepair {

TrainConfig sample_config(const SearchSpace& space, Rng& rng, const TrainConfig& base) {
  if (space.batch_sizes.empty() || space.aggregators.empty() || !(space.min_learning_rate > 0.0) ||
      space.max_learning_rate < space.min_learning_rate || space.max_weight_decay < space.min_weight_decay ||
      space.min_weight_decay < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "malformed search space");
  }
  TrainConfig c = base;
  const double lo = std::log(space.min_learning_rate);
  const double hi = std::log(space.max_learning_rate);
  c.learning_rate = std::clamp(std::exp(uniform_real(rng, lo, hi)), space.min_learning_rate, space.max_learning_rate);
  c.batch_size = space.batch_sizes[uniform_index(rng, space.batch_sizes.size())];
  c.weight_decay = uniform_real(rng, space.min_weight_decay, space.max_weight_decay);
  c.aggregator = space.aggregators[uniform_index(rng, space.aggregators.size())];
  return c;
}

SearchResult random_search(const SearchSpace& space, std::size_t budget, std::uint64_t seed,
                           const SearchObjective& objective, const TrainConfig& base) {
  if (budget == 0) throw Error(ErrorCode::InvalidConfig, "search budget must be at least 1");
  Rng rng(seed);
  SearchResult result;
  result.best_objective = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < budget; ++t) {
    Trial trial{sample_config(space, rng, base), 0.0};
    trial.config.seed = base.seed;
    trial.objective = objective(trial.config);
    const double score = std::isfinite(trial.objective) ? trial.objective : std::numeric_limits<double>::infinity();
    if (t == 0 || score < result.best_objective) {
      result.best_objective = score;
      result.best_index = t;
      result.best = trial.config;
    }
    result.trials.push_back(std::move(trial));
  }
  return result;
}

}  // namespace logrepair
