#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "logrepair/tensor/tape.hpp"

namespace logrepair {

/// Moment estimates for Adam, one pair per parameter.
struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update with coupled L2 decay
/// (g += weight_decay * p before the moments), then zeroes the gradients.
void adam_step(std::span<Parameter> params, AdamState& state, double learning_rate, double weight_decay);

}  // namespace logrepair
