#include "das/csv.hpp"

#include <charconv>

namespace das {

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out;
  out.reserve(value.size() + 2);
  out += '"';
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_csv_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += "\r\n";
}

std::string links_cell(const DataAccessStatement& statement) {
  std::string out;
  for (std::size_t i = 0; i < statement.links.size(); ++i) {
    if (i) out += '|';
    out += statement.links[i].canonical;
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::vector<std::string> csv_fields(const StatementRecord& record) {
  const auto& s = record.statement;
  return {s.document_id,
          record.document_metadata.title.value_or(""),
          record.effective_text(),
          std::string(to_string(s.category)),
          links_cell(s),
          std::to_string(s.score),
          format_double(s.confidence),
          std::string(to_string(record.curation.decision)),
          record.curation.decided_at ? format_timestamp(*record.curation.decided_at) : ""};
}

std::string records_to_csv(const std::vector<StatementRecord>& records) {
  std::string out(kCsvHeader);
  out += "\r\n";
  for (const auto& record : records) append_csv_row(out, csv_fields(record));
  return out;
}

}  // namespace das
