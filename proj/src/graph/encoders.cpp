#include "logrepair/graph/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logrepair/error.hpp"
#include "logrepair/log/schema_io.hpp"

namespace logrepair {

std::size_t AttributeEncoder::class_of(std::string_view value) const {
  auto it = index_.find(std::string(value));
  return it != index_.end() ? it->second : missing_index();
}

void EncoderSet::reindex() {
  for (auto& a : attributes) {
    a.index_.clear();
    if (!a.categorical()) continue;
    for (std::size_t i = 0; i + 1 < a.vocabulary.size(); ++i) a.index_.emplace(a.vocabulary[i], i);
  }
}

EncoderSet fit_encoders(const EventLog& train) {
  if (train.traces.empty()) throw Error(ErrorCode::EmptyLog, "cannot fit encoders on an empty log");
  EncoderSet enc;
  enc.schema = train.schema;
  const std::size_t ts_index = train.schema.timestamp_index();

  for (std::size_t a = 0; a < train.schema.size(); ++a) {
    const auto& spec = train.schema.attributes[a];
    AttributeEncoder e;
    e.name = spec.name;
    e.kind = spec.kind;
    if (spec.kind == AttributeKind::Categorical) {
      std::unordered_map<std::string, std::size_t> seen;
      for (const auto& t : train.traces) {
        for (const auto& ev : t.events) {
          if (const auto* s = ev.values[a].as_string();
              s && *s != kMissingValueClass && seen.emplace(*s, e.vocabulary.size()).second) {
            e.vocabulary.push_back(*s);
          }
        }
      }
      e.vocabulary.emplace_back(kMissingValueClass);
    } else {
      e.transform = spec.kind == AttributeKind::Timestamp ? NumericTransform::SignedLog1pElapsed
                                                          : NumericTransform::Log1p;
    }
    enc.attributes.push_back(std::move(e));
  }
  enc.reindex();

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::vector<double> mins(enc.attributes.size(), lo), maxs(enc.attributes.size(), hi);
  for (const auto& t : train.traces) {
    std::optional<Timestamp> origin;
    for (const auto& ev : t.events) {
      if (const auto* ts = ev.values[ts_index].as_timestamp()) {
        origin = *ts;
        break;
      }
    }
    if (origin && (!enc.fallback_origin || origin->micros < enc.fallback_origin->micros)) enc.fallback_origin = origin;
    for (const auto& ev : t.events) {
      for (std::size_t a = 0; a < enc.attributes.size(); ++a) {
        const auto& e = enc.attributes[a];
        if (e.categorical() || ev.values[a].is_missing()) continue;
        if (e.kind == AttributeKind::Timestamp && !origin) continue;
        const double v = transform_value(ev.values[a], e, origin);
        mins[a] = std::min(mins[a], v);
        maxs[a] = std::max(maxs[a], v);
      }
    }
  }
  for (std::size_t a = 0; a < enc.attributes.size(); ++a) {
    if (enc.attributes[a].categorical() || mins[a] > maxs[a]) continue;
    enc.attributes[a].min_transformed = mins[a];
    enc.attributes[a].max_transformed = maxs[a];
  }
  return enc;
}

double transform_value(const Cell& cell, const AttributeEncoder& enc, const std::optional<Timestamp>& origin) {
  if (const auto* ts = cell.as_timestamp()) {
    if (!origin) throw Error(ErrorCode::InvalidConfig, "timestamp feature of '" + enc.name + "' needs an origin");
    const double s = seconds_between(*origin, *ts);
    return s < 0 ? -std::log1p(-s) : std::log1p(s);
  }
  if (const auto* x = cell.as_number()) {
    if (*x < 0) {
      throw Error(ErrorCode::NegativeDerivedValue, "attribute '" + enc.name + "' has value " + cell.text());
    }
    return std::log1p(*x);
  }
  throw Error(ErrorCode::SchemaMismatch, "attribute '" + enc.name + "' holds no numeric value");
}

double inverse_transform(double feature, const AttributeEncoder& enc) {
  if (enc.transform == NumericTransform::SignedLog1pElapsed) {
    return feature < 0 ? -std::expm1(-feature) : std::expm1(feature);
  }
  return std::max(0.0, std::expm1(feature));
}

std::vector<double> encode_value(const Cell& cell, const AttributeEncoder& enc, const std::optional<Timestamp>& origin) {
  if (enc.categorical()) {
    std::vector<double> row(enc.width(), 0.0);
    const auto* s = cell.as_string();
    row[s ? enc.class_of(*s) : enc.missing_index()] = 1.0;
    return row;
  }
  if (cell.is_missing()) return {kMissingNumeric};
  return {transform_value(cell, enc, origin)};
}

nlohmann::json encoders_to_json(const EncoderSet& enc) {
  nlohmann::json attrs = nlohmann::json::array();
  for (const auto& a : enc.attributes) {
    nlohmann::json j{{"name", a.name}, {"kind", to_string(a.kind)}};
    if (a.categorical()) {
      j["vocabulary"] = a.vocabulary;
    } else {
      j["transform"] = a.transform == NumericTransform::Log1p ? "log1p" : "signed_log1p_elapsed";
      j["min"] = a.min_transformed;
      j["max"] = a.max_transformed;
    }
    attrs.push_back(std::move(j));
  }
  nlohmann::json out{{"format", "logrepair-encoders"}, {"version", 1}, {"schema", schema_to_json(enc.schema)},
                     {"attributes", std::move(attrs)}};
  if (enc.fallback_origin) {
    out["fallback_origin_micros"] = enc.fallback_origin->micros;
    out["fallback_origin_offset"] = enc.fallback_origin->offset_minutes ? nlohmann::json(*enc.fallback_origin->offset_minutes)
                                                                          : nlohmann::json(nullptr);
  }
  return out;
}

EncoderSet encoders_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "logrepair-encoders" || j.value("version", 0) != 1) {
      throw Error(ErrorCode::FormatError, "not a version 1 encoder document");
    }
    EncoderSet enc;
    enc.schema = schema_from_json(j.at("schema"));
    for (const auto& a : j.at("attributes")) {
      AttributeEncoder e;
      e.name = a.at("name").get<std::string>();
      e.kind = parse_attribute_kind(a.at("kind").get<std::string>());
      if (e.categorical()) {
        e.vocabulary = a.at("vocabulary").get<std::vector<std::string>>();
        if (e.vocabulary.empty() || e.vocabulary.back() != kMissingValueClass) {
          throw Error(ErrorCode::FormatError, "vocabulary of '" + e.name + "' must end with MISSING VALUE");
        }
      } else {
        e.transform = a.at("transform").get<std::string>() == "log1p" ? NumericTransform::Log1p
                                                                     : NumericTransform::SignedLog1pElapsed;
        e.min_transformed = a.value("min", 0.0);
        e.max_transformed = a.value("max", 0.0);
      }
      enc.attributes.push_back(std::move(e));
    }
    if (enc.attributes.size() != enc.schema.size()) {
      throw Error(ErrorCode::SchemaMismatch, "encoder count differs from schema");
    }
    for (std::size_t i = 0; i < enc.attributes.size(); ++i) {
      if (enc.attributes[i].name != enc.schema.attributes[i].name ||
          enc.attributes[i].kind != enc.schema.attributes[i].kind) {
        throw Error(ErrorCode::SchemaMismatch, "encoder '" + enc.attributes[i].name + "' does not match schema");
      }
    }
    if (j.contains("fallback_origin_micros")) {
      Timestamp t;
      t.micros = j.at("fallback_origin_micros").get<std::int64_t>();
      if (j.contains("fallback_origin_offset") && !j.at("fallback_origin_offset").is_null()) {
        t.offset_minutes = j.at("fallback_origin_offset").get<int>();
      }
      enc.fallback_origin = t;
    }
    enc.reindex();
    return enc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("encoder document: ") + e.what());
  }
}

}  // namespace logrepair
