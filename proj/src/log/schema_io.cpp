#include "logrepair/log/schema_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include "logrepair/error.hpp"
#include "logrepair/log/csv.hpp"

namespace logrepair {

nlohmann::json schema_to_json(const AttributeSchema& schema) {
  nlohmann::json attrs = nlohmann::json::array();
  for (const auto& a : schema.attributes) {
    attrs.push_back({{"name", a.name}, {"kind", to_string(a.kind)}, {"scope", to_string(a.scope)}});
  }
  return {{"case_id", schema.case_id_column},
          {"activity", schema.activity_column},
          {"timestamp", schema.timestamp_column},
          {"attributes", std::move(attrs)}};
}

AttributeSchema schema_from_json(const nlohmann::json& j) {
  try {
    AttributeSchema s;
    s.case_id_column = j.value("case_id", s.case_id_column);
    s.activity_column = j.value("activity", s.activity_column);
    s.timestamp_column = j.value("timestamp", s.timestamp_column);
    for (const auto& a : j.at("attributes")) {
      s.attributes.push_back(AttributeSpec{a.at("name").get<std::string>(),
                                           parse_attribute_kind(a.value("kind", "categorical")),
                                           parse_attribute_scope(a.value("scope", "event"))});
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("schema document: ") + e.what());
  }
}

namespace {

bool is_number(const std::string& s) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  double v = 0;
  const auto res = std::from_chars(first, last, v);
  return res.ec == std::errc{} && res.ptr == last && std::isfinite(v);
}

bool is_xes_string_key(const std::string& name) {
  static const char* const keys[] = {"concept:name", "concept:instance", "org:resource", "org:role",
                                     "org:group",    "lifecycle:transition", "lifecycle:state", "lifecycle:model"};
  return std::find(std::begin(keys), std::end(keys), name) != std::end(keys);
}

}  // namespace

AttributeSchema infer_schema(std::istream& in, const SchemaHints& hints) {
  const CsvTable table = read_csv_table(in, hints.delimiter);
  auto column_of = [&](const std::string& name) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (table.header[c] == name) return c;
    }
    throw Error(ErrorCode::MissingColumn, name);
  };
  const std::size_t case_col = column_of(hints.case_id_column);
  column_of(hints.activity_column);
  column_of(hints.timestamp_column);

  AttributeSchema schema;
  schema.case_id_column = hints.case_id_column;
  schema.activity_column = hints.activity_column;
  schema.timestamp_column = hints.timestamp_column;

  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == case_col) continue;
    const std::string& name = table.header[c];
    bool all_numeric = true;
    bool all_timestamps = true;
    bool any_present = false;
    bool constant_per_case = true;
    std::unordered_map<std::string, std::string> per_case;
    for (const auto& row : table.rows) {
      const std::string& v = row[c];
      if (v.empty() || v == hints.missing_token) continue;
      any_present = true;
      if (all_numeric && !is_number(v)) all_numeric = false;
      if (all_timestamps && !parse_timestamp(v)) all_timestamps = false;
      if (constant_per_case) {
        auto [it, inserted] = per_case.try_emplace(row[case_col], v);
        if (!inserted && it->second != v) constant_per_case = false;
      }
    }
    AttributeSpec spec{name, AttributeKind::Categorical, AttributeScope::Event};
    const bool forced_categorical =
        name == hints.activity_column || is_xes_string_key(name) ||
        std::find(hints.categorical.begin(), hints.categorical.end(), name) != hints.categorical.end();
    if (name == hints.timestamp_column) {
      spec.kind = AttributeKind::Timestamp;
    } else if (!forced_categorical && any_present && all_numeric) {
      spec.kind = AttributeKind::Numeric;
    } else if (!forced_categorical && any_present && all_timestamps) {
      spec.kind = AttributeKind::Timestamp;
    }
    if (name != hints.activity_column && name != hints.timestamp_column && constant_per_case) {
      spec.scope = AttributeScope::Trace;
    }
    schema.attributes.push_back(std::move(spec));
  }
  schema.validate();
  return schema;
}

}  // namespace logrepair
