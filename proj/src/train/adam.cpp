#include "logrepair/train/adam.hpp"

#include <cmath>

#include "logrepair/error.hpp"

namespace logrepair {

void adam_step(std::span<Parameter> params, AdamState& state, double learning_rate, double weight_decay) {
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.value.rows(), p.value.cols());
      state.second_moment.emplace_back(p.value.rows(), p.value.cols());
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw Error(ErrorCode::ShapeMismatch, "optimizer state was built for another parameter set");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(AdamState::kBeta1, t);
  const double c2 = 1.0 - std::pow(AdamState::kBeta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    double* m = state.first_moment[i].data();
    double* v = state.second_moment[i].data();
    double* w = p.value.data();
    double* g = p.grad.data();
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double grad = g[k] + weight_decay * w[k];
      m[k] = AdamState::kBeta1 * m[k] + (1.0 - AdamState::kBeta1) * grad;
      v[k] = AdamState::kBeta2 * v[k] + (1.0 - AdamState::kBeta2) * grad * grad;
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      w[k] -= learning_rate * m_hat / (std::sqrt(v_hat) + AdamState::kEpsilon);
      g[k] = 0.0;
    }
  }
}

}  // namespace logrepair
