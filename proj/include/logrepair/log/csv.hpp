#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "logrepair/log/event_log.hpp"

namespace logrepair {

struct CsvOptions {
  std::string missing_token = "-";
  char delimiter = ',';
};

/// Header plus data rows of an RFC 4180 style CSV document.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Throws MalformedCsv on unterminated quotes or ragged rows.
CsvTable read_csv_table(std::istream& in, char delimiter = ',');
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter = ',');

/// Group rows by case id (first-seen order), convert cells to the schema's
/// kinds and order each trace by timestamp. Empty fields and the missing
/// token become Missing cells.
EventLog parse_csv_log(std::istream& in, const AttributeSchema& schema, const CsvOptions& options = {});

/// Header is the case id column followed by the schema attributes.
void write_csv_log(const EventLog& log, std::ostream& out, const CsvOptions& options = {});

}  // namespace logrepair
