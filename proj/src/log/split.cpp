#include "logrepair/log/split.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "logrepair/error.hpp"
#include "logrepair/random.hpp"

namespace logrepair {

LogSplits split_log(const EventLog& log, const SplitRatios& r, std::uint64_t seed) {
  if (!(r.train > 0 && r.validation > 0 && r.test > 0) ||
      std::abs(r.train + r.validation + r.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidRatios, "ratios must be positive and sum to 1");
  }
  const std::size_t n = log.traces.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0x5b117));
  shuffle(std::span<std::size_t>(order), rng);

  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * r.validation));
  const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * r.test));
  const std::size_t n_train = n - n_val - n_test;

  LogSplits out;
  for (auto* part : {&out.train, &out.validation, &out.test}) part->schema = log.schema;
  out.train.split = SplitTag::Train;
  out.validation.split = SplitTag::Validation;
  out.test.split = SplitTag::Test;
  for (std::size_t i = 0; i < n; ++i) {
    EventLog& dst = i < n_train ? out.train : (i < n_train + n_val ? out.validation : out.test);
    dst.traces.push_back(log.traces[order[i]]);
  }
  return out;
}

}  // namespace logrepair
