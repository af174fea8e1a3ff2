#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "logrepair/log/event_log.hpp"

namespace logrepair {

// {"case_id": ..., "activity": ..., "timestamp": ...,
//  "attributes": [{"name": ..., "kind": ..., "scope": ...}, ...]}
nlohmann::json schema_to_json(const AttributeSchema& schema);
AttributeSchema schema_from_json(const nlohmann::json& j);

struct SchemaHints {
  std::string case_id_column = "case_id";
  std::string activity_column = "activity";
  std::string timestamp_column = "timestamp";
  std::string missing_token = "-";
  char delimiter = ',';
  /// Columns that stay categorical even if every value parses as a number.
  std::vector<std::string> categorical;
};

/// Kind per column: numeric if every present value parses as a number, else
/// timestamp if every one parses as a timestamp, else categorical. XES
/// standard-extension keys with a string type (org:resource, org:role, ...)
/// and hinted columns are always categorical. Scope is trace when the value
/// is constant within every case.
AttributeSchema infer_schema(std::istream& in, const SchemaHints& hints = {});

}  // namespace logrepair
