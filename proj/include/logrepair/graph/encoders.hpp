#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "logrepair/log/event_log.hpp"

namespace logrepair {

inline constexpr std::string_view kMissingValueClass = "MISSING VALUE";
inline constexpr double kMissingNumeric = -1.0;

/// How a numeric or timestamp attribute is mapped to its single feature.
enum class NumericTransform {
  Log1p,              // log1p(x), x >= 0
  SignedLog1pElapsed  // sign(s) * log1p(|s|), s = seconds since the trace origin
};

struct AttributeEncoder {
  std::string name;
  AttributeKind kind = AttributeKind::Categorical;
  std::vector<std::string> vocabulary;  // categorical only; last entry is MISSING VALUE
  NumericTransform transform = NumericTransform::Log1p;
  double min_transformed = 0.0;  // over training values, reporting only
  double max_transformed = 0.0;

  bool categorical() const noexcept { return kind == AttributeKind::Categorical; }
  std::size_t width() const noexcept { return categorical() ? vocabulary.size() : 1; }
  std::size_t missing_index() const noexcept { return vocabulary.size() - 1; }
  /// Vocabulary index; unseen values map to the MISSING VALUE class.
  std::size_t class_of(std::string_view value) const;

 private:
  friend struct EncoderSet;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Encoders for every schema attribute, fitted on a training split.
struct EncoderSet {
  AttributeSchema schema;
  std::vector<AttributeEncoder> attributes;
  /// Origin for timestamp features of traces without any usable timestamp:
  /// the earliest timestamp seen in training.
  std::optional<Timestamp> fallback_origin;

  /// Rebuild lookup tables after editing vocabularies.
  void reindex();
  std::size_t activity_index() const { return schema.activity_index(); }
  std::size_t timestamp_index() const { return schema.timestamp_index(); }
};

/// Vocabularies in first-seen order plus MISSING VALUE; numeric ranges.
EncoderSet fit_encoders(const EventLog& train);

/// Scalar feature for a present numeric/timestamp cell. Timestamps need the
/// trace origin. Throws NegativeDerivedValue for negative numeric values.
double transform_value(const Cell& cell, const AttributeEncoder& enc, const std::optional<Timestamp>& origin);

/// Inverse of transform_value's numeric map, in raw units (seconds for
/// timestamps). Numeric results are clamped at 0.
double inverse_transform(double feature, const AttributeEncoder& enc);

/// Feature row: one-hot over the vocabulary, or [transformed value]; Missing
/// encodes as the MISSING VALUE one-hot or [-1].
std::vector<double> encode_value(const Cell& cell, const AttributeEncoder& enc,
                                 const std::optional<Timestamp>& origin = std::nullopt);

nlohmann::json encoders_to_json(const EncoderSet& enc);
EncoderSet encoders_from_json(const nlohmann::json& j);

}  // namespace logrepair
