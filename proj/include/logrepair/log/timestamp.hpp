#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace logrepair {

/// An instant with microsecond resolution plus the UTC offset it was written
/// with. Two timestamps compare equal only if both instant and offset match;
/// use `micros` for chronological ordering.
struct Timestamp {
  std::int64_t micros = 0;                 // since 1970-01-01T00:00:00Z
  std::optional<int> offset_minutes;       // absent: written without offset

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

/// Accepts `YYYY-MM-DD[T ]HH:MM:SS[.fraction][Z|+HH:MM|+HHMM]`. A value
/// without offset is taken as UTC. Returns nullopt on anything else.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// `YYYY-MM-DD HH:MM:SS[.ffffff][+HH:MM]`, fraction only when non-zero.
std::string format_timestamp(const Timestamp& ts);

inline double seconds_between(const Timestamp& from, const Timestamp& to) {
  return static_cast<double>(to.micros - from.micros) * 1e-6;
}

inline Timestamp add_seconds(const Timestamp& ts, double seconds) {
  return Timestamp{ts.micros + static_cast<std::int64_t>(seconds * 1e6 + (seconds >= 0 ? 0.5 : -0.5)),
                   ts.offset_minutes};
}

}  // namespace logrepair
