#pragma once

#include <cstdint>

#include "logrepair/log/event_log.hpp"

namespace logrepair {

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

struct LogSplits {
  EventLog train;
  EventLog validation;
  EventLog test;
};

/// Trace-level split: seeded shuffle of trace order, then contiguous
/// partitions of floor(n * ratio) traces for validation and test; the
/// remainder goes to train. Throws InvalidRatios.
LogSplits split_log(const EventLog& log, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace logrepair
