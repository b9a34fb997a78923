#include "das/records.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "das/json.hpp"

namespace das {

using nlohmann::json;

Timestamp now_micros() {
  auto now = std::chrono::system_clock::now().time_since_epoch();
  return std::chrono::duration_cast<std::chrono::microseconds>(now).count();
}

std::string format_timestamp(Timestamp t) {
  std::int64_t secs = t / 1000000;
  std::int64_t micros = t % 1000000;
  if (micros < 0) {
    micros += 1000000;
    --secs;
  }
  std::time_t tt = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<long long>(micros));
  return buf;
}

std::string_view to_string(Decision decision) {
  switch (decision) {
    case Decision::pending: return "pending";
    case Decision::accepted: return "accepted";
    case Decision::rejected: return "rejected";
    case Decision::edited: return "edited";
  }
  return "pending";
}

std::optional<Decision> parse_decision(std::string_view name) {
  for (Decision d : {Decision::pending, Decision::accepted, Decision::rejected, Decision::edited}) {
    if (to_string(d) == name) return d;
  }
  return std::nullopt;
}

const std::string& StatementRecord::effective_text() const {
  if (curation.decision == Decision::edited && curation.edited_text) return *curation.edited_text;
  return statement.text;
}

namespace {

json optional_json(const std::optional<std::string>& value) {
  return value ? json(*value) : json(nullptr);
}

}  // namespace

void to_json(json& j, const DocumentMetadata& metadata) {
  j = json{{"title", optional_json(metadata.title)}, {"origin", optional_json(metadata.origin)}};
}

void to_json(json& j, const CurationRecord& record) {
  j = json{{"decision", to_string(record.decision)},
           {"edited_text", optional_json(record.edited_text)},
           {"actor", record.actor},
           {"decided_at", record.decided_at ? json(format_timestamp(*record.decided_at))
                                            : json(nullptr)},
           {"version", record.version}};
}

void to_json(json& j, const StatementContext& context) {
  j = json{{"offset", context.offset}, {"text", context.text}};
}

void to_json(json& j, const StatementRecord& record) {
  j = json{{"statement", record.statement},
           {"document_metadata", record.document_metadata},
           {"curation", record.curation},
           {"created_at", format_timestamp(record.created_at)},
           {"context", record.context}};
}

void to_json(json& j, const AuditEntry& entry) {
  j = json{{"statement_id", entry.statement_id},
           {"from_decision", to_string(entry.from_decision)},
           {"to_decision", to_string(entry.to_decision)},
           {"actor", entry.actor},
           {"at", format_timestamp(entry.at)},
           {"version", entry.version}};
}

void to_json(json& j, const StatementPage& page) {
  j = json{{"total", page.total}, {"items", page.items}};
}

void to_json(json& j, const SubmitResult& result) {
  j = json{{"document_id", result.document_id},
           {"extraction", result.extraction},
           {"records", result.records}};
}

}  // namespace das
