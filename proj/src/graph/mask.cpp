#include "logrepair/graph/mask.hpp"

#include <algorithm>

#include "logrepair/error.hpp"
#include "logrepair/random.hpp"

namespace logrepair {

std::vector<MaskStrategy> MaskStrategy::standard(double random_p) {
  return {odd(), even(), window(), random(random_p)};
}

std::string MaskStrategy::name() const {
  switch (kind) {
    case Kind::Odd: return "odd";
    case Kind::Even: return "even";
    case Kind::Window: return "window";
    case Kind::Random: return "random";
    case Kind::Explicit: return "explicit";
  }
  return "odd";
}

MaskStrategy parse_mask_strategy(std::string_view name, double random_p) {
  if (name == "odd") return MaskStrategy::odd();
  if (name == "even") return MaskStrategy::even();
  if (name == "window") return MaskStrategy::window();
  if (name == "random") {
    if (!(random_p > 0.0 && random_p < 1.0)) throw Error(ErrorCode::InvalidFlag, "random p must lie in (0,1)");
    return MaskStrategy::random(random_p);
  }
  throw Error(ErrorCode::InvalidFlag, "unknown mask strategy '" + std::string(name) + "'");
}

EventMask apply_mask(std::size_t n, const MaskStrategy& s, std::uint64_t seed) {
  EventMask mask(n, false);
  switch (s.kind) {
    case MaskStrategy::Kind::Odd:
      for (std::size_t i = 1; i < n; i += 2) mask[i] = true;
      break;
    case MaskStrategy::Kind::Even:
      for (std::size_t i = 0; i < n; i += 2) mask[i] = true;
      break;
    case MaskStrategy::Kind::Window:
      for (std::size_t i = 0; i < n; ++i) mask[i] = i % 3 != 0;
      break;
    case MaskStrategy::Kind::Random: {
      if (!(s.p > 0.0 && s.p < 1.0)) throw Error(ErrorCode::InvalidConfig, "random mask p must lie in (0,1)");
      Rng rng(derive_seed(seed, 0x3a5c));
      for (std::size_t i = 0; i < n; ++i) mask[i] = uniform01(rng) < s.p;
      if (n > 0 && std::all_of(mask.begin(), mask.end(), [](bool b) { return b; })) mask[0] = false;
      break;
    }
    case MaskStrategy::Kind::Explicit:
      for (std::size_t i : s.indices) {
        if (i >= n) {
          throw Error(ErrorCode::InvalidConfig, "explicit mask index " + std::to_string(i) + " beyond trace length " +
                                                    std::to_string(n));
        }
        mask[i] = true;
      }
      break;
  }
  return mask;
}

std::size_t max_missing_run(const EventMask& mask) {
  std::size_t best = 0, run = 0;
  for (bool m : mask) {
    run = m ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

std::optional<std::string> coverage_check(const EventMask& mask, std::size_t layers) {
  const std::size_t run = max_missing_run(mask);
  if (run <= 2 * layers) return std::nullopt;
  return "run of " + std::to_string(run) + " empty events exceeds twice the " + std::to_string(layers) +
         " message-passing layers; some masked nodes see no observed neighbour";
}

}  // namespace logrepair
