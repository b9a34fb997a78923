#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "das/records.hpp"

namespace das {

inline constexpr std::string_view kCsvHeader =
    "document_id,title,statement_text,category,links,score,confidence,decision,decided_at";

// RFC 4180 field: quoted when it holds a comma, quote, CR or LF.
std::string csv_field(std::string_view value);

// Appends one CRLF-terminated row.
void append_csv_row(std::string& out, const std::vector<std::string>& fields);

// Canonical link values joined with '|'.
std::string links_cell(const DataAccessStatement& statement);

std::vector<std::string> csv_fields(const StatementRecord& record);

// Header plus one row per record, in the given order.
std::string records_to_csv(const std::vector<StatementRecord>& records);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace das
