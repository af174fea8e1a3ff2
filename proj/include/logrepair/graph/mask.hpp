#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logrepair {

using EventMask = std::vector<bool>;

/// Rule choosing which events of a trace are removed. Indices are 0-based.
struct MaskStrategy {
  enum class Kind { Odd, Even, Window, Random, Explicit };

  Kind kind = Kind::Odd;
  double p = 0.5;                      // Random
  std::vector<std::size_t> indices;    // Explicit

  static MaskStrategy odd() { return {Kind::Odd}; }
  static MaskStrategy even() { return {Kind::Even}; }
  static MaskStrategy window() { return {Kind::Window}; }
  static MaskStrategy random(double p) { return {Kind::Random, p, {}}; }
  static MaskStrategy explicit_indices(std::vector<std::size_t> idx) { return {Kind::Explicit, 0.5, std::move(idx)}; }

  /// The four strategies models are trained and evaluated on.
  static std::vector<MaskStrategy> standard(double random_p = 0.5);

  std::string name() const;
};

/// "odd" | "even" | "window" | "random"; throws InvalidFlag otherwise.
MaskStrategy parse_mask_strategy(std::string_view name, double random_p = 0.5);

/// Per-event removal flags. ODD removes 1,3,5..; EVEN 0,2,4..; WINDOW keeps
/// one event then removes two; RANDOM removes each event with probability p
/// and never removes every event (index 0 is restored in that case).
/// Throws InvalidConfig for p outside (0,1) or explicit indices out of range.
EventMask apply_mask(std::size_t trace_len, const MaskStrategy& strategy, std::uint64_t seed);

/// Length of the longest run of consecutive set flags.
std::size_t max_missing_run(const EventMask& mask);

/// Warning text when some empty run exceeds twice the layer count, i.e. a
/// masked node can receive no information from an observed event.
std::optional<std::string> coverage_check(const EventMask& mask, std::size_t layers);

}  // namespace logrepair
