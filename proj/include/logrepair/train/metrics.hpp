#pragma once

#include <cmath>
#include <span>
#include <string>

#include "logrepair/error.hpp"

namespace logrepair {

namespace detail {
inline void check_aligned(std::size_t preds, std::size_t truth) {
  if (preds != truth) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(preds) + " predictions for " + std::to_string(truth) + " targets");
  }
  if (preds == 0) throw Error(ErrorCode::EmptyEvaluationSet, "no masked values to score");
}
}  // namespace detail

/// Exact-match fraction.
template <class T>
double accuracy(std::span<const T> preds, std::span<const T> truth) {
  detail::check_aligned(preds.size(), truth.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

inline double mae(std::span<const double> preds, std::span<const double> truth) {
  detail::check_aligned(preds.size(), truth.size());
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) total += std::abs(preds[i] - truth[i]);
  return total / static_cast<double>(preds.size());
}

}  // namespace logrepair
