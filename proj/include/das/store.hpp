#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "das/records.hpp"

struct sqlite3;

namespace das {

struct StoredDocument {
  std::string id;
  DocumentMetadata metadata;
  ExtractionResult extraction;
  std::vector<StatementRecord> records;  // span order
};

struct IntegrityReport {
  bool ok = true;
  std::vector<std::string> problems;
};

// Persistence for documents, statement records and the audit log. All
// failures of the backing store surface as Error(StoreUnavailable).
class StatementStore {
 public:
  virtual ~StatementStore() = default;

  virtual std::optional<StoredDocument> find_document(const std::string& document_id) = 0;

  // Inserts the document and its records atomically. Returns false and
  // writes nothing when the document id already exists.
  virtual bool insert_document(const StoredDocument& document) = 0;

  virtual std::optional<StatementRecord> get(const std::string& statement_id) = 0;

  virtual StatementPage list(const StatementFilter& filter, PageRequest page) = 0;

  // Every match, in list order.
  virtual std::vector<StatementRecord> list_all(const StatementFilter& filter) = 0;

  // Check-and-swap on the curation version. Throws NotFound or
  // VersionConflict. Appends one audit entry on success.
  virtual CurationRecord decide(const std::string& statement_id, const DecisionRequest& request) = 0;

  virtual std::vector<AuditEntry> audit(const std::string& statement_id) = 0;

  virtual IntegrityReport check_integrity() = 0;
};

// SQLite in WAL mode. Writes go through one connection under a mutex;
// reads draw from a pool of connections and run concurrently.
class SqliteStore final : public StatementStore {
 public:
  explicit SqliteStore(const std::string& path);
  ~SqliteStore() override;

  SqliteStore(const SqliteStore&) = delete;
  SqliteStore& operator=(const SqliteStore&) = delete;

  std::optional<StoredDocument> find_document(const std::string& document_id) override;
  bool insert_document(const StoredDocument& document) override;
  std::optional<StatementRecord> get(const std::string& statement_id) override;
  StatementPage list(const StatementFilter& filter, PageRequest page) override;
  std::vector<StatementRecord> list_all(const StatementFilter& filter) override;
  CurationRecord decide(const std::string& statement_id, const DecisionRequest& request) override;
  std::vector<AuditEntry> audit(const std::string& statement_id) override;
  IntegrityReport check_integrity() override;

  // Forces a WAL checkpoint into the main database file.
  void checkpoint();

 private:
  class ReadLease;

  sqlite3* acquire_reader();
  void release_reader(sqlite3* db);

  std::string path_;
  std::mutex write_mutex_;
  sqlite3* writer_ = nullptr;
  std::mutex pool_mutex_;
  std::vector<sqlite3*> readers_;
};

}  // namespace das
