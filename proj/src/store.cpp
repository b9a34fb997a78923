#include "das/store.hpp"

#include <sqlite3.h>

#include <functional>
#include <map>

#include "das/error.hpp"
#include "das/json.hpp"

namespace das {

namespace {

[[noreturn]] void fail(sqlite3* db, const std::string& what) {
  std::string detail = db ? sqlite3_errmsg(db) : "out of memory";
  throw Error(ErrorCode::StoreUnavailable, what + ": " + detail);
}

void exec(sqlite3* db, const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string message = err ? err : "unknown error";
    sqlite3_free(err);
    throw Error(ErrorCode::StoreUnavailable, std::string(sql) + ": " + message);
  }
}

class Stmt {
 public:
  Stmt(sqlite3* db, const std::string& sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt_, nullptr) != SQLITE_OK) fail(db, "prepare");
  }
  ~Stmt() { sqlite3_finalize(stmt_); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  Stmt& bind(int i, const std::string& v) {
    return check(sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
  }
  Stmt& bind(int i, std::int64_t v) { return check(sqlite3_bind_int64(stmt_, i, v)); }
  Stmt& bind(int i, int v) { return check(sqlite3_bind_int64(stmt_, i, v)); }
  Stmt& bind(int i, double v) { return check(sqlite3_bind_double(stmt_, i, v)); }
  Stmt& bind(int i, const std::optional<std::string>& v) {
    return v ? bind(i, *v) : check(sqlite3_bind_null(stmt_, i));
  }
  Stmt& bind(int i, const std::optional<Timestamp>& v) {
    return v ? bind(i, *v) : check(sqlite3_bind_null(stmt_, i));
  }

  bool step() {
    int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    fail(db_, "step");
  }

  std::string text(int col) {
    auto p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, sqlite3_column_bytes(stmt_, col)) : std::string();
  }
  std::optional<std::string> optional_text(int col) {
    if (sqlite3_column_type(stmt_, col) == SQLITE_NULL) return std::nullopt;
    return text(col);
  }
  std::int64_t integer(int col) { return sqlite3_column_int64(stmt_, col); }
  std::optional<std::int64_t> optional_integer(int col) {
    if (sqlite3_column_type(stmt_, col) == SQLITE_NULL) return std::nullopt;
    return integer(col);
  }

 private:
  Stmt& check(int rc) {
    if (rc != SQLITE_OK) fail(db_, "bind");
    return *this;
  }

  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

class Transaction {
 public:
  explicit Transaction(sqlite3* db) : db_(db) { exec(db_, "BEGIN IMMEDIATE"); }
  ~Transaction() {
    if (!done_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
  }
  void commit() {
    exec(db_, "COMMIT");
    done_ = true;
  }

 private:
  sqlite3* db_;
  bool done_ = false;
};

// Snapshot for multi-statement reads.
class ReadTransaction {
 public:
  explicit ReadTransaction(sqlite3* db) : db_(db) { exec(db_, "BEGIN"); }
  ~ReadTransaction() { sqlite3_exec(db_, "COMMIT", nullptr, nullptr, nullptr); }

 private:
  sqlite3* db_;
};

sqlite3* open_connection(const std::string& path, int flags) {
  sqlite3* db = nullptr;
  int rc = sqlite3_open_v2(path.c_str(), &db, flags, nullptr);
  if (rc != SQLITE_OK) {
    std::string detail = db ? sqlite3_errmsg(db) : "out of memory";
    sqlite3_close(db);
    throw Error(ErrorCode::StoreUnavailable, "cannot open store '" + path + "': " + detail);
  }
  sqlite3_busy_timeout(db, 10000);
  return db;
}

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS documents (
  id TEXT PRIMARY KEY,
  title TEXT,
  origin TEXT,
  created_at INTEGER NOT NULL,
  extraction TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS statements (
  id TEXT PRIMARY KEY,
  document_id TEXT NOT NULL REFERENCES documents(id),
  ordinal INTEGER NOT NULL,
  category TEXT NOT NULL,
  confidence REAL NOT NULL,
  statement TEXT NOT NULL,
  decision TEXT NOT NULL,
  edited_text TEXT,
  actor TEXT NOT NULL,
  decided_at INTEGER,
  version INTEGER NOT NULL CHECK (version >= 1),
  created_at INTEGER NOT NULL,
  context_offset INTEGER NOT NULL,
  context_text TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS statements_order ON statements (created_at DESC, id);
CREATE INDEX IF NOT EXISTS statements_document ON statements (document_id, ordinal);
CREATE TABLE IF NOT EXISTS audit (
  seq INTEGER PRIMARY KEY AUTOINCREMENT,
  statement_id TEXT NOT NULL REFERENCES statements(id),
  from_decision TEXT NOT NULL,
  to_decision TEXT NOT NULL,
  actor TEXT NOT NULL,
  at INTEGER NOT NULL,
  version INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS audit_statement ON audit (statement_id, seq);
)sql";

constexpr const char* kRecordColumns =
    "SELECT s.statement, d.title, d.origin, s.decision, s.edited_text, s.actor, s.decided_at, "
    "s.version, s.created_at, s.context_offset, s.context_text FROM statements s JOIN documents d ON d.id = s.document_id";

Decision decision_column(const std::string& value) {
  auto d = parse_decision(value);
  if (!d) throw Error(ErrorCode::StoreUnavailable, "corrupt decision value '" + value + "'");
  return *d;
}

StatementRecord read_record(Stmt& q) {
  StatementRecord r;
  try {
    r.statement = nlohmann::json::parse(q.text(0)).get<DataAccessStatement>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::StoreUnavailable, std::string("corrupt statement row: ") + e.what());
  }
  r.document_metadata.title = q.optional_text(1);
  r.document_metadata.origin = q.optional_text(2);
  r.curation.decision = decision_column(q.text(3));
  r.curation.edited_text = q.optional_text(4);
  r.curation.actor = q.text(5);
  r.curation.decided_at = q.optional_integer(6);
  r.curation.version = static_cast<int>(q.integer(7));
  r.created_at = q.integer(8);
  r.context.offset = static_cast<std::size_t>(q.integer(9));
  r.context.text = q.text(10);
  return r;
}

struct WhereClause {
  std::string sql;
  std::vector<std::function<void(Stmt&, int)>> binders;
};

WhereClause build_where(const StatementFilter& f) {
  WhereClause w;
  std::vector<std::string> terms;
  if (f.category) {
    terms.push_back("s.category = ?");
    std::string v(to_string(*f.category));
    w.binders.push_back([v](Stmt& s, int i) { s.bind(i, v); });
  }
  if (f.decision) {
    terms.push_back("s.decision = ?");
    std::string v(to_string(*f.decision));
    w.binders.push_back([v](Stmt& s, int i) { s.bind(i, v); });
  }
  if (f.min_confidence) {
    terms.push_back("s.confidence >= ?");
    double v = *f.min_confidence;
    w.binders.push_back([v](Stmt& s, int i) { s.bind(i, v); });
  }
  if (f.document_id) {
    terms.push_back("s.document_id = ?");
    std::string v = *f.document_id;
    w.binders.push_back([v](Stmt& s, int i) { s.bind(i, v); });
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    w.sql += (i == 0 ? " WHERE " : " AND ") + terms[i];
  }
  return w;
}

int bind_where(Stmt& q, const WhereClause& w) {
  int index = 1;
  for (const auto& binder : w.binders) binder(q, index++);
  return index;
}

}  // namespace

class SqliteStore::ReadLease {
 public:
  explicit ReadLease(SqliteStore& store) : store_(store), db_(store.acquire_reader()) {}
  ~ReadLease() { store_.release_reader(db_); }
  sqlite3* get() const { return db_; }

 private:
  SqliteStore& store_;
  sqlite3* db_;
};

SqliteStore::SqliteStore(const std::string& path) : path_(path) {
  writer_ = open_connection(path, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
  try {
    Stmt mode(writer_, "PRAGMA journal_mode=WAL");
    if (!mode.step() || mode.text(0) != "wal") {
      throw Error(ErrorCode::StoreUnavailable, "store '" + path + "' does not support WAL mode");
    }
    exec(writer_, "PRAGMA synchronous=FULL");
    exec(writer_, "PRAGMA foreign_keys=ON");
    exec(writer_, kSchema);
  } catch (...) {
    sqlite3_close(writer_);
    throw;
  }
}

SqliteStore::~SqliteStore() {
  for (sqlite3* db : readers_) sqlite3_close(db);
  sqlite3_close(writer_);
}

sqlite3* SqliteStore::acquire_reader() {
  {
    std::lock_guard lock(pool_mutex_);
    if (!readers_.empty()) {
      sqlite3* db = readers_.back();
      readers_.pop_back();
      return db;
    }
  }
  sqlite3* db = open_connection(path_, SQLITE_OPEN_READWRITE);
  sqlite3_exec(db, "PRAGMA query_only=ON", nullptr, nullptr, nullptr);
  return db;
}

void SqliteStore::release_reader(sqlite3* db) {
  std::lock_guard lock(pool_mutex_);
  readers_.push_back(db);
}

std::optional<StoredDocument> SqliteStore::find_document(const std::string& document_id) {
  ReadLease lease(*this);
  sqlite3* db = lease.get();
  ReadTransaction read(db);

  Stmt doc(db, "SELECT title, origin, extraction FROM documents WHERE id = ?");
  doc.bind(1, document_id);
  if (!doc.step()) return std::nullopt;
  StoredDocument out;
  out.id = document_id;
  out.metadata.title = doc.optional_text(0);
  out.metadata.origin = doc.optional_text(1);
  try {
    out.extraction = nlohmann::json::parse(doc.text(2)).get<ExtractionResult>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::StoreUnavailable, std::string("corrupt document row: ") + e.what());
  }
  Stmt rows(db, std::string(kRecordColumns) + " WHERE s.document_id = ? ORDER BY s.ordinal");
  rows.bind(1, document_id);
  while (rows.step()) out.records.push_back(read_record(rows));
  return out;
}

bool SqliteStore::insert_document(const StoredDocument& document) {
  std::lock_guard lock(write_mutex_);
  Transaction tx(writer_);
  Stmt exists(writer_, "SELECT 1 FROM documents WHERE id = ?");
  exists.bind(1, document.id);
  if (exists.step()) return false;

  Timestamp created = document.records.empty() ? now_micros() : document.records.front().created_at;
  Stmt doc(writer_,
           "INSERT INTO documents (id, title, origin, created_at, extraction) VALUES (?, ?, ?, ?, ?)");
  doc.bind(1, document.id)
      .bind(2, document.metadata.title)
      .bind(3, document.metadata.origin)
      .bind(4, created)
      .bind(5, nlohmann::json(document.extraction).dump());
  doc.step();

  int ordinal = 0;
  for (const auto& r : document.records) {
    Stmt ins(writer_,
             "INSERT INTO statements (id, document_id, ordinal, category, confidence, statement, "
             "decision, edited_text, actor, decided_at, version, created_at, context_offset, "
             "context_text) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)");
    ins.bind(1, r.statement.id)
        .bind(2, document.id)
        .bind(3, ordinal++)
        .bind(4, std::string(to_string(r.statement.category)))
        .bind(5, r.statement.confidence)
        .bind(6, nlohmann::json(r.statement).dump())
        .bind(7, std::string(to_string(r.curation.decision)))
        .bind(8, r.curation.edited_text)
        .bind(9, r.curation.actor)
        .bind(10, r.curation.decided_at)
        .bind(11, r.curation.version)
        .bind(12, r.created_at)
        .bind(13, static_cast<std::int64_t>(r.context.offset))
        .bind(14, r.context.text);
    ins.step();
  }
  tx.commit();
  return true;
}

std::optional<StatementRecord> SqliteStore::get(const std::string& statement_id) {
  ReadLease lease(*this);
  Stmt q(lease.get(), std::string(kRecordColumns) + " WHERE s.id = ?");
  q.bind(1, statement_id);
  if (!q.step()) return std::nullopt;
  return read_record(q);
}

StatementPage SqliteStore::list(const StatementFilter& filter, PageRequest page) {
  if (page.number < 1 || page.size < 1 || page.size > kMaxPageSize) {
    throw Error(ErrorCode::InvalidFilter, "page out of range");
  }
  ReadLease lease(*this);
  sqlite3* db = lease.get();
  WhereClause where = build_where(filter);
  StatementPage out;

  ReadTransaction read(db);

  Stmt count(db, "SELECT COUNT(*) FROM statements s" + where.sql);
  bind_where(count, where);
  count.step();
  out.total = static_cast<std::size_t>(count.integer(0));

  Stmt rows(db, std::string(kRecordColumns) + where.sql +
                    " ORDER BY s.created_at DESC, s.id ASC LIMIT ? OFFSET ?");
  int next = bind_where(rows, where);
  rows.bind(next, static_cast<std::int64_t>(page.size));
  rows.bind(next + 1, static_cast<std::int64_t>(page.number - 1) * page.size);
  while (rows.step()) out.items.push_back(read_record(rows));
  return out;
}

std::vector<StatementRecord> SqliteStore::list_all(const StatementFilter& filter) {
  ReadLease lease(*this);
  WhereClause where = build_where(filter);
  Stmt rows(lease.get(),
            std::string(kRecordColumns) + where.sql + " ORDER BY s.created_at DESC, s.id ASC");
  bind_where(rows, where);
  std::vector<StatementRecord> out;
  while (rows.step()) out.push_back(read_record(rows));
  return out;
}

CurationRecord SqliteStore::decide(const std::string& statement_id,
                                   const DecisionRequest& request) {
  std::lock_guard lock(write_mutex_);
  Transaction tx(writer_);

  Stmt current(writer_, "SELECT decision, version FROM statements WHERE id = ?");
  current.bind(1, statement_id);
  if (!current.step()) throw Error(ErrorCode::NotFound, "no statement '" + statement_id + "'");
  Decision from = decision_column(current.text(0));
  int version = static_cast<int>(current.integer(1));
  if (version != request.expected_version) {
    throw Error(ErrorCode::VersionConflict, "expected version " +
                                                std::to_string(request.expected_version) +
                                                ", current version is " + std::to_string(version));
  }

  Stmt last(writer_, "SELECT MAX(at) FROM audit WHERE statement_id = ?");
  last.bind(1, statement_id);
  last.step();
  Timestamp at = now_micros();
  if (auto prev = last.optional_integer(0); prev && at <= *prev) at = *prev + 1;

  CurationRecord next;
  next.decision = request.decision;
  if (request.decision == Decision::edited) next.edited_text = request.edited_text;
  next.actor = request.actor;
  if (request.decision != Decision::pending) next.decided_at = at;
  next.version = version + 1;

  Stmt update(writer_,
              "UPDATE statements SET decision = ?, edited_text = ?, actor = ?, decided_at = ?, "
              "version = ? WHERE id = ? AND version = ?");
  update.bind(1, std::string(to_string(next.decision)))
      .bind(2, next.edited_text)
      .bind(3, next.actor)
      .bind(4, next.decided_at)
      .bind(5, next.version)
      .bind(6, statement_id)
      .bind(7, version);
  update.step();

  Stmt log(writer_,
           "INSERT INTO audit (statement_id, from_decision, to_decision, actor, at, version) "
           "VALUES (?, ?, ?, ?, ?, ?)");
  log.bind(1, statement_id)
      .bind(2, std::string(to_string(from)))
      .bind(3, std::string(to_string(next.decision)))
      .bind(4, next.actor)
      .bind(5, at)
      .bind(6, next.version);
  log.step();

  tx.commit();
  return next;
}

std::vector<AuditEntry> SqliteStore::audit(const std::string& statement_id) {
  ReadLease lease(*this);
  Stmt q(lease.get(),
         "SELECT from_decision, to_decision, actor, at, version FROM audit "
         "WHERE statement_id = ? ORDER BY seq");
  q.bind(1, statement_id);
  std::vector<AuditEntry> out;
  while (q.step()) {
    AuditEntry e;
    e.statement_id = statement_id;
    e.from_decision = decision_column(q.text(0));
    e.to_decision = decision_column(q.text(1));
    e.actor = q.text(2);
    e.at = q.integer(3);
    e.version = static_cast<int>(q.integer(4));
    out.push_back(std::move(e));
  }
  return out;
}

IntegrityReport SqliteStore::check_integrity() {
  ReadLease lease(*this);
  sqlite3* db = lease.get();
  IntegrityReport report;
  auto problem = [&](std::string text) {
    report.ok = false;
    report.problems.push_back(std::move(text));
  };

  ReadTransaction read(db);

  Stmt integrity(db, "PRAGMA integrity_check");
  while (integrity.step()) {
    std::string line = integrity.text(0);
    if (line != "ok") problem("integrity_check: " + line);
  }
  Stmt fk(db, "PRAGMA foreign_key_check");
  while (fk.step()) problem("dangling reference in table " + fk.text(0));

  struct Current {
    std::string decision;
    int version;
  };
  std::map<std::string, Current> current;
  Stmt statements(db, "SELECT id, decision, version FROM statements");
  while (statements.step()) {
    current[statements.text(0)] = {statements.text(1), static_cast<int>(statements.integer(2))};
  }

  struct Trail {
    int last_version = 1;
    std::string last_decision = "pending";
    std::optional<Timestamp> last_at;
  };
  std::map<std::string, Trail> trails;
  Stmt log(db,
           "SELECT statement_id, from_decision, to_decision, at, version FROM audit "
           "ORDER BY statement_id, seq");
  while (log.step()) {
    std::string id = log.text(0);
    auto& t = trails[id];
    int version = static_cast<int>(log.integer(4));
    Timestamp at = log.integer(3);
    if (version != t.last_version + 1) {
      problem("statement " + id + ": audit version " + std::to_string(version) + " follows " +
              std::to_string(t.last_version));
    }
    if (log.text(1) != t.last_decision) problem("statement " + id + ": audit chain broken");
    if (t.last_at && at <= *t.last_at) problem("statement " + id + ": audit time not increasing");
    t.last_version = version;
    t.last_decision = log.text(2);
    t.last_at = at;
  }
  for (const auto& [id, cur] : current) {
    Trail t;
    if (auto it = trails.find(id); it != trails.end()) t = it->second;
    if (t.last_version != cur.version) {
      problem("statement " + id + ": version " + std::to_string(cur.version) +
              " but audit ends at " + std::to_string(t.last_version));
    }
    if (t.last_decision != cur.decision) problem("statement " + id + ": decision not in audit");
  }
  for (const auto& [id, t] : trails) {
    if (!current.count(id)) problem("audit entries for unknown statement " + id);
  }
  return report;
}

void SqliteStore::checkpoint() {
  std::lock_guard lock(write_mutex_);
  exec(writer_, "PRAGMA wal_checkpoint(TRUNCATE)");
}

}  // namespace das
