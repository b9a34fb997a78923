#include "das/service.hpp"

#include <algorithm>

#include "das/csv.hpp"
#include "das/error.hpp"
#include "das/extraction.hpp"
#include "das/unicode.hpp"

namespace das {

namespace {

bool blank(const std::string& text) {
  auto u = unicode::from_utf8(text);
  return std::all_of(u.begin(), u.end(), [](char32_t c) { return unicode::is_space(c); });
}

}  // namespace

StatementContext statement_context(const Document& document, Span span) {
  Span section{0, document.text.size()};
  for (const auto& s : document.sections) {
    if (s.span.start <= span.start && span.start < s.span.end) {
      section = s.span;
      break;
    }
  }
  std::size_t start = span.start > kContextRadius ? span.start - kContextRadius : 0;
  std::size_t end = std::min(document.text.size(), span.end + kContextRadius);
  start = std::max(start, section.start);
  end = std::max(std::min(end, section.end), span.end);
  return {start, document.slice_utf8({start, end})};
}

CurationService::CurationService(ExtractionConfig config, std::shared_ptr<StatementStore> store,
                                 std::string converter_command)
    : config_(std::move(config)), store_(std::move(store)) {
  ingest_options_.heading_lexicon = config_.heading_lexicon;
  ingest_options_.converter_command = std::move(converter_command);
}

Document CurationService::ingest(const InputDescriptor& payload) const {
  return load_document(payload, ingest_options_);
}

CheckResult CurationService::check_document(const InputDescriptor& payload) const {
  Document document = ingest(payload);
  CheckResult out;
  out.extraction = extract(document, config_);
  for (const auto& statement : out.extraction.statements) {
    out.contexts.push_back(statement_context(document, statement.span));
  }
  return out;
}

SubmitResult CurationService::submit_document(const InputDescriptor& payload) {
  Document document = ingest(payload);
  auto existing_result = [&](StoredDocument stored) {
    SubmitResult out;
    out.document_id = stored.id;
    out.extraction = std::move(stored.extraction);
    out.records = std::move(stored.records);
    out.created = false;
    return out;
  };
  if (auto stored = store_->find_document(document.id)) return existing_result(std::move(*stored));

  StoredDocument fresh;
  fresh.id = document.id;
  fresh.metadata = document.metadata;
  fresh.extraction = extract(document, config_);
  Timestamp created = now_micros();
  for (const auto& statement : fresh.extraction.statements) {
    StatementRecord record;
    record.statement = statement;
    record.document_metadata = document.metadata;
    record.created_at = created;
    record.context = statement_context(document, statement.span);
    fresh.records.push_back(std::move(record));
  }
  if (!store_->insert_document(fresh)) {
    // Lost a race with an identical submission.
    auto stored = store_->find_document(document.id);
    if (!stored) throw Error(ErrorCode::StoreUnavailable, "document vanished after insert race");
    return existing_result(std::move(*stored));
  }
  SubmitResult out;
  out.document_id = fresh.id;
  out.extraction = std::move(fresh.extraction);
  out.records = std::move(fresh.records);
  out.created = true;
  return out;
}

StatementPage CurationService::list_statements(const StatementFilter& filter, PageRequest page) {
  if (page.number < 1) throw Error(ErrorCode::InvalidFilter, "page must be >= 1");
  if (page.size < 1 || page.size > kMaxPageSize) {
    throw Error(ErrorCode::InvalidFilter,
                "page_size must be between 1 and " + std::to_string(kMaxPageSize));
  }
  return store_->list(filter, page);
}

StatementRecord CurationService::get_statement(const std::string& statement_id) {
  auto record = store_->get(statement_id);
  if (!record) throw Error(ErrorCode::NotFound, "no statement '" + statement_id + "'");
  return *record;
}

CurationRecord CurationService::decide(const std::string& statement_id,
                                       const DecisionRequest& request) {
  if (request.decision == Decision::edited) {
    if (!request.edited_text || blank(*request.edited_text)) {
      throw Error(ErrorCode::MissingEditedText, "decision 'edited' requires edited_text");
    }
  } else if (request.edited_text) {
    throw Error(ErrorCode::InvalidRequest, "edited_text is only allowed with decision 'edited'");
  }
  if (blank(request.actor)) {
    throw Error(ErrorCode::InvalidRequest, "actor is required");
  }
  if (request.expected_version < 1) {
    throw Error(ErrorCode::InvalidRequest, "expected_version must be >= 1");
  }
  return store_->decide(statement_id, request);
}

std::vector<AuditEntry> CurationService::audit(const std::string& statement_id) {
  if (!store_->get(statement_id)) {
    throw Error(ErrorCode::NotFound, "no statement '" + statement_id + "'");
  }
  return store_->audit(statement_id);
}

std::string CurationService::export_csv(const StatementFilter& filter) {
  return records_to_csv(store_->list_all(filter));
}

}  // namespace das
