#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "das/config.hpp"
#include "das/document.hpp"
#include "das/extraction.hpp"

namespace das {

// Microseconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

Timestamp now_micros();

// "2026-01-02T03:04:05.123456Z"
std::string format_timestamp(Timestamp t);

enum class Decision { pending, accepted, rejected, edited };

std::string_view to_string(Decision decision);
std::optional<Decision> parse_decision(std::string_view name);

struct CurationRecord {
  Decision decision = Decision::pending;
  std::optional<std::string> edited_text;  // set iff decision == edited
  std::string actor = "system";
  std::optional<Timestamp> decided_at;
  int version = 1;
};

// Document text around a statement, for highlighting its span.
struct StatementContext {
  std::size_t offset = 0;  // absolute start of `text` in the document
  std::string text;
};

struct StatementRecord {
  DataAccessStatement statement;
  DocumentMetadata document_metadata;
  CurationRecord curation;
  Timestamp created_at = 0;
  StatementContext context;

  // edited_text for edited records, the extracted text otherwise.
  const std::string& effective_text() const;
};

struct AuditEntry {
  std::string statement_id;
  Decision from_decision = Decision::pending;
  Decision to_decision = Decision::pending;
  std::string actor;
  Timestamp at = 0;
  int version = 0;  // version after this write
};

struct StatementFilter {
  std::optional<Category> category;
  std::optional<Decision> decision;
  std::optional<double> min_confidence;
  std::optional<std::string> document_id;
};

inline constexpr int kDefaultPageSize = 50;
inline constexpr int kMaxPageSize = 200;

struct PageRequest {
  int number = 1;  // 1-based
  int size = kDefaultPageSize;
};

struct StatementPage {
  std::size_t total = 0;
  std::vector<StatementRecord> items;
};

struct DecisionRequest {
  Decision decision = Decision::pending;
  std::optional<std::string> edited_text;
  std::string actor;
  int expected_version = 0;
};

struct SubmitResult {
  std::string document_id;
  ExtractionResult extraction;
  std::vector<StatementRecord> records;
  bool created = false;
};

void to_json(nlohmann::json& j, const DocumentMetadata& metadata);
void to_json(nlohmann::json& j, const CurationRecord& record);
void to_json(nlohmann::json& j, const StatementContext& context);
void to_json(nlohmann::json& j, const StatementRecord& record);
void to_json(nlohmann::json& j, const AuditEntry& entry);
void to_json(nlohmann::json& j, const StatementPage& page);
void to_json(nlohmann::json& j, const SubmitResult& result);

}  // namespace das
