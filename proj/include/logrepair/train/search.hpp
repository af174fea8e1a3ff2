#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "logrepair/random.hpp"
#include "logrepair/train/config.hpp"

namespace logrepair {

struct Trial {
  TrainConfig config;
  double objective = 0.0;
};

struct SearchResult {
  TrainConfig best;
  double best_objective = 0.0;
  std::size_t best_index = 0;
  std::vector<Trial> trials;  // in sampling order
};

/// Validation loss of a candidate; non-finite values rank last.
using SearchObjective = std::function<double(const TrainConfig&)>;

/// Learning rate log-uniform, batch size and aggregator uniform over their
/// sets, weight decay uniform. Fields not searched are copied from `base`.
TrainConfig sample_config(const SearchSpace& space, Rng& rng, const TrainConfig& base = {});

/// `budget` sampled trials, returning the argmin (earliest on ties). Throws
/// InvalidConfig for budget 0 or an empty space.
SearchResult random_search(const SearchSpace& space, std::size_t budget, std::uint64_t seed,
                           const SearchObjective& objective, const TrainConfig& base = {});

}  // namespace logrepair
