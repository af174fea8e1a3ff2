#include "logrepair/log/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <unordered_map>

#include "logrepair/error.hpp"

namespace logrepair {

CsvTable read_csv_table(std::istream& in, char delimiter) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    // a blank line is not a record
    if (!(record.size() == 1 && record[0].empty() && !field_started)) records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };

  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
    } else if (c == '\n') {
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::MalformedCsv, "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();

  CsvTable table;
  if (records.empty()) throw Error(ErrorCode::MalformedCsv, "missing header row");
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw Error(ErrorCode::MalformedCsv, "row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                                               " fields, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(delimiter);
    const std::string& f = fields[i];
    const bool quote = f.find_first_of(std::string{'"', '\n', '\r', delimiter}) != std::string::npos;
    if (!quote) {
      out << f;
      continue;
    }
    out.put('"');
    for (char c : f) {
      if (c == '"') out.put('"');
      out.put(c);
    }
    out.put('"');
  }
  out.put('\n');
}

namespace {

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  double v = 0;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

EventLog parse_csv_log(std::istream& in, const AttributeSchema& schema, const CsvOptions& options) {
  schema.validate();
  const CsvTable table = read_csv_table(in, options.delimiter);

  auto column_of = [&](const std::string& name) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (table.header[c] == name) return c;
    }
    throw Error(ErrorCode::MissingColumn, name);
  };
  const std::size_t case_col = column_of(schema.case_id_column);
  std::vector<std::size_t> cols;
  for (const auto& a : schema.attributes) cols.push_back(column_of(a.name));

  if (table.rows.empty()) throw Error(ErrorCode::EmptyLog, "no data rows");

  EventLog log;
  log.schema = schema;
  std::unordered_map<std::string, std::size_t> trace_of;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string& case_id = row[case_col];
    if (case_id.empty() || case_id == options.missing_token) {
      throw Error(ErrorCode::MalformedCsv, "row " + std::to_string(r + 1) + " has no case id");
    }
    Event ev;
    ev.values.reserve(cols.size());
    for (std::size_t a = 0; a < cols.size(); ++a) {
      const std::string& raw = row[cols[a]];
      if (raw.empty() || raw == options.missing_token) {
        ev.values.push_back(Cell::missing());
        continue;
      }
      switch (schema.attributes[a].kind) {
        case AttributeKind::Categorical:
          ev.values.push_back(Cell::with_text(raw, raw));
          break;
        case AttributeKind::Numeric: {
          auto v = parse_number(raw);
          if (!v) {
            throw Error(ErrorCode::UnparsableValue, "row " + std::to_string(r + 1) + ", column '" +
                                                        schema.attributes[a].name + "': '" + raw + "'");
          }
          ev.values.push_back(Cell::with_text(*v, raw));
          break;
        }
        case AttributeKind::Timestamp: {
          auto ts = parse_timestamp(raw);
          if (!ts) {
            throw Error(ErrorCode::UnparsableTimestamp, "row " + std::to_string(r + 1) + ", column '" +
                                                            schema.attributes[a].name + "': '" + raw + "'");
          }
          ev.values.push_back(Cell::with_text(*ts, raw));
          break;
        }
      }
    }
    auto [it, inserted] = trace_of.try_emplace(case_id, log.traces.size());
    if (inserted) log.traces.push_back(Trace{case_id, {}});
    log.traces[it->second].events.push_back(std::move(ev));
  }

  const std::size_t ts_index = schema.timestamp_index();
  for (auto& t : log.traces) sort_events_by_timestamp(t, ts_index);
  log.validate();
  return log;
}

void write_csv_log(const EventLog& log, std::ostream& out, const CsvOptions& options) {
  std::vector<std::string> fields;
  fields.push_back(log.schema.case_id_column);
  for (const auto& a : log.schema.attributes) fields.push_back(a.name);
  write_csv_row(out, fields, options.delimiter);
  for (const auto& trace : log.traces) {
    for (const auto& ev : trace.events) {
      fields.clear();
      fields.push_back(trace.case_id);
      for (const auto& cell : ev.values) fields.push_back(cell.is_missing() ? options.missing_token : cell.text());
      write_csv_row(out, fields, options.delimiter);
    }
  }
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing CSV");
}

}  // namespace logrepair
