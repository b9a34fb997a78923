#pragma once

#include <memory>
#include <string>
#include <vector>

#include "das/config.hpp"
#include "das/ingest.hpp"
#include "das/records.hpp"
#include "das/store.hpp"

namespace das {

// The statement's section, clipped to kContextRadius code points on
// either side of the span.
inline constexpr std::size_t kContextRadius = 400;
StatementContext statement_context(const Document& document, Span span);

struct CheckResult {
  ExtractionResult extraction;
  std::vector<StatementContext> contexts;  // parallel to extraction.statements
};

// Ingest, extraction and curation over a StatementStore. Thread-safe.
class CurationService {
 public:
  CurationService(ExtractionConfig config, std::shared_ptr<StatementStore> store,
                  std::string converter_command = "");

  // Persists one pending record per statement. Identical bytes map to the
  // same document id; a resubmission returns the stored result with
  // created == false.
  SubmitResult submit_document(const InputDescriptor& payload);

  // Same pipeline as submit_document, never touches the store.
  CheckResult check_document(const InputDescriptor& payload) const;

  StatementPage list_statements(const StatementFilter& filter, PageRequest page);
  StatementRecord get_statement(const std::string& statement_id);
  CurationRecord decide(const std::string& statement_id, const DecisionRequest& request);
  std::vector<AuditEntry> audit(const std::string& statement_id);
  std::string export_csv(const StatementFilter& filter);

  const ExtractionConfig& config() const { return config_; }

 private:
  Document ingest(const InputDescriptor& payload) const;

  ExtractionConfig config_;
  IngestOptions ingest_options_;
  std::shared_ptr<StatementStore> store_;
};

}  // namespace das
