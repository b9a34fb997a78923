#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <set>
#include <thread>

#include "das/csv.hpp"
#include "das/error.hpp"
#include "das/json.hpp"
#include "das/service.hpp"
#include "das/store.hpp"
#include "das/unicode.hpp"
#include "test_support.hpp"

using das::Decision;
using das::ErrorCode;
using testing::TempDir;

namespace fs = std::filesystem;

namespace {

das::InputDescriptor plain(const std::string& text, std::optional<std::string> title = std::nullopt) {
  das::InputDescriptor in;
  in.content = text;
  in.metadata.title = std::move(title);
  return in;
}

std::vector<fs::path> positives() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(fs::path(DAS_CORPUS_DIR) / "positives")) {
    if (e.path().extension() == ".txt") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string snippet_one() {
  return testing::slurp(fs::path(DAS_CORPUS_DIR) / "positives/p01_zenodo_doi.txt");
}

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const das::Error& e) {
    return e.code();
  }
  FAIL("no das::Error thrown");
  return ErrorCode::CorpusInvalid;
}

das::DecisionRequest request(Decision d, int version, std::string actor = "curator") {
  das::DecisionRequest r;
  r.decision = d;
  r.expected_version = version;
  r.actor = std::move(actor);
  return r;
}

// Every call fails as if the backing file were gone.
class OfflineStore final : public das::StatementStore {
 public:
  [[noreturn]] static void down() { throw das::Error(ErrorCode::StoreUnavailable, "offline"); }
  std::optional<das::StoredDocument> find_document(const std::string&) override { down(); }
  bool insert_document(const das::StoredDocument&) override { down(); }
  std::optional<das::StatementRecord> get(const std::string&) override { down(); }
  das::StatementPage list(const das::StatementFilter&, das::PageRequest) override { down(); }
  std::vector<das::StatementRecord> list_all(const das::StatementFilter&) override { down(); }
  das::CurationRecord decide(const std::string&, const das::DecisionRequest&) override { down(); }
  std::vector<das::AuditEntry> audit(const std::string&) override { down(); }
  das::IntegrityReport check_integrity() override { down(); }
};

struct Fixture {
  TempDir dir;
  std::shared_ptr<das::SqliteStore> store = std::make_shared<das::SqliteStore>((dir / "s.db").string());
  das::CurationService service{das::builtin_config(), store};

  // Everything a client can observe.
  std::string snapshot() {
    nlohmann::json all = store->list_all({});
    nlohmann::json audits = nlohmann::json::array();
    for (const auto& item : all) {
      audits.push_back(store->audit(item["statement"]["id"].get<std::string>()));
    }
    return all.dump() + audits.dump();
  }
};

}  // namespace

TEST_CASE("submit snippet one") {
  Fixture f;
  auto result = f.service.submit_document(plain(snippet_one(), "Soil"));
  CHECK(result.created);
  REQUIRE(result.records.size() == 1);
  const auto& r = result.records[0];
  CHECK(r.curation.decision == Decision::pending);
  CHECK(r.curation.version == 1);
  CHECK_FALSE(r.curation.decided_at.has_value());
  CHECK(r.document_metadata.title == "Soil");
  CHECK(r.statement.document_id == result.document_id);
  CHECK(result.extraction.statements.size() == 1);

  auto stored = f.service.get_statement(r.statement.id);
  CHECK(nlohmann::json(stored).dump() == nlohmann::json(r).dump());
}

TEST_CASE("records carry their surrounding section") {
  Fixture f;
  auto text = snippet_one();
  auto doc = testing::make_document(text);
  auto result = f.service.submit_document(plain(text));
  const auto& r = result.records.at(0);
  // The statement sits under its heading; the section runs to the next heading.
  CHECK(r.context.text ==
        "Data Availability Statement\n"
        "The data are openly available in Zenodo at https://doi.org/10.5281/zenodo.100.\n");
  auto u32 = das::unicode::from_utf8(r.context.text);
  auto local = r.statement.span.start - r.context.offset;
  CHECK(das::unicode::to_utf8(std::u32string_view(u32).substr(local, r.statement.span.length())) ==
        r.statement.text);
  CHECK(f.service.get_statement(r.statement.id).context.text == r.context.text);
  auto checked = f.service.check_document(plain(text));
  REQUIRE(checked.contexts.size() == 1);
  CHECK(checked.contexts[0].offset == r.context.offset);
  CHECK(checked.contexts[0].text == r.context.text);
}

TEST_CASE("context is clipped around long sections") {
  std::string filler;
  for (int i = 0; i < 60; ++i) filler += "Sentence number " + std::to_string(i) + " is filler. ";
  auto doc = testing::make_document(filler + "The data are openly available in Dryad at doi:10.5061/dryad.x1. " + filler);
  auto result = das::extract(doc, das::builtin_config());
  REQUIRE(result.statements.size() == 1);
  auto span = result.statements[0].span;
  auto ctx = das::statement_context(doc, span);
  CHECK(ctx.offset == span.start - das::kContextRadius);
  CHECK(das::unicode::from_utf8(ctx.text).size() == span.length() + 2 * das::kContextRadius);
}

TEST_CASE("idempotent submit") {
  Fixture f;
  auto first = f.service.submit_document(plain(snippet_one()));
  auto before = f.snapshot();
  for (int i = 0; i < 3; ++i) {
    auto again = f.service.submit_document(plain(snippet_one()));
    CHECK_FALSE(again.created);
    CHECK(again.document_id == first.document_id);
    REQUIRE(again.records.size() == first.records.size());
    CHECK(again.records[0].statement.id == first.records[0].statement.id);
  }
  CHECK(f.snapshot() == before);
  CHECK(f.service.list_statements({}, {}).total == 1);
}

TEST_CASE("concurrent identical submissions store one document") {
  Fixture f;
  std::atomic<int> created{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      if (f.service.submit_document(plain(snippet_one())).created) ++created;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(created == 1);
  CHECK(f.service.list_statements({}, {}).total == 1);
}

TEST_CASE("empty text is an ingest error") {
  Fixture f;
  CHECK(error_of([&] { f.service.submit_document(plain("  \n ")); }) == ErrorCode::EmptyDocument);
  CHECK(error_of([&] { f.service.check_document(plain("")); }) == ErrorCode::EmptyDocument);
}

TEST_CASE("check equals submit and writes nothing") {
  Fixture f;
  f.service.submit_document(plain(testing::slurp(positives().at(3))));
  auto before = f.snapshot();
  auto checked = f.service.check_document(plain(snippet_one())).extraction;
  CHECK(f.snapshot() == before);
  auto submitted = f.service.submit_document(plain(snippet_one()));
  CHECK(nlohmann::json(checked).dump() == nlohmann::json(submitted.extraction).dump());

  auto none = f.service.check_document(plain("The weather was mild.")).extraction;
  CHECK_FALSE(none.passed_prefilter);
  CHECK(none.statements.empty());
}

TEST_CASE("check works with the store offline") {
  das::CurationService service(das::builtin_config(), std::make_shared<OfflineStore>());
  auto result = service.check_document(plain(snippet_one()));
  CHECK(result.extraction.statements.size() == 1);
  CHECK(result.contexts.size() == 1);
  CHECK(error_of([&] { service.submit_document(plain(snippet_one())); }) ==
        ErrorCode::StoreUnavailable);
}

TEST_CASE("unwritable store path") {
  CHECK(error_of([] { das::SqliteStore("/nonexistent/dir/x.db"); }) == ErrorCode::StoreUnavailable);
}

TEST_CASE("listing") {
  Fixture f;
  auto empty = f.service.list_statements({}, {});
  CHECK(empty.total == 0);
  CHECK(empty.items.empty());

  for (const auto& p : positives()) f.service.submit_document(plain(testing::slurp(p)));
  das::StatementFilter pending;
  pending.decision = Decision::pending;
  auto page = f.service.list_statements(pending, {1, 200});
  CHECK(page.total == 30);
  CHECK(page.items.size() == 30);

  // created_at desc, then id
  for (std::size_t i = 1; i < page.items.size(); ++i) {
    const auto& a = page.items[i - 1];
    const auto& b = page.items[i];
    bool ordered = a.created_at > b.created_at ||
                   (a.created_at == b.created_at && a.statement.id < b.statement.id);
    CHECK(ordered);
  }

  // paging covers the same sequence
  std::vector<std::string> paged;
  for (int n = 1; n <= 4; ++n) {
    auto p = f.service.list_statements(pending, {n, 8});
    CHECK(p.total == 30);
    for (const auto& item : p.items) paged.push_back(item.statement.id);
  }
  std::vector<std::string> whole;
  for (const auto& item : page.items) whole.push_back(item.statement.id);
  CHECK(paged == whole);

  das::StatementFilter accepted;
  accepted.decision = Decision::accepted;
  CHECK(f.service.list_statements(accepted, {}).total == 0);

  das::StatementFilter by_doc;
  by_doc.document_id = page.items[0].statement.document_id;
  CHECK(f.service.list_statements(by_doc, {}).total == 1);

  das::StatementFilter confident;
  confident.min_confidence = 0.6;
  auto high = f.service.list_statements(confident, {1, 200});
  std::size_t expected = std::count_if(page.items.begin(), page.items.end(), [](const auto& r) {
    return r.statement.confidence >= 0.6;
  });
  CHECK(high.total == expected);

  for (auto category : das::kAllCategories) {
    das::StatementFilter fc;
    fc.category = category;
    auto expected_n = std::count_if(page.items.begin(), page.items.end(),
                                    [&](const auto& r) { return r.statement.category == category; });
    CHECK(f.service.list_statements(fc, {1, 200}).total == static_cast<std::size_t>(expected_n));
  }

  CHECK(error_of([&] { f.service.list_statements({}, {0, 10}); }) == ErrorCode::InvalidFilter);
  CHECK(error_of([&] { f.service.list_statements({}, {1, 201}); }) == ErrorCode::InvalidFilter);
}

TEST_CASE("decisions") {
  Fixture f;
  auto id = f.service.submit_document(plain(snippet_one())).records.at(0).statement.id;

  auto accepted = f.service.decide(id, request(Decision::accepted, 1));
  CHECK(accepted.decision == Decision::accepted);
  CHECK(accepted.version == 2);
  CHECK(accepted.actor == "curator");
  CHECK(accepted.decided_at.has_value());

  auto stale = request(Decision::rejected, 1);
  CHECK(error_of([&] { f.service.decide(id, stale); }) == ErrorCode::VersionConflict);
  CHECK(f.service.get_statement(id).curation.version == 2);

  CHECK(error_of([&] { f.service.decide(id, request(Decision::edited, 2)); }) ==
        ErrorCode::MissingEditedText);
  auto blank_edit = request(Decision::edited, 2);
  blank_edit.edited_text = "   ";
  CHECK(error_of([&] { f.service.decide(id, blank_edit); }) == ErrorCode::MissingEditedText);
  auto stray_text = request(Decision::accepted, 2);
  stray_text.edited_text = "x";
  CHECK(error_of([&] { f.service.decide(id, stray_text); }) == ErrorCode::InvalidRequest);
  CHECK(error_of([&] { f.service.decide(id, request(Decision::accepted, 2, " ")); }) ==
        ErrorCode::InvalidRequest);
  CHECK(error_of([&] { f.service.decide("missing", request(Decision::accepted, 1)); }) ==
        ErrorCode::NotFound);
  CHECK(error_of([&] { f.service.get_statement("missing"); }) == ErrorCode::NotFound);
  CHECK(error_of([&] { f.service.audit("missing"); }) == ErrorCode::NotFound);

  auto edit = request(Decision::edited, 2, "editor");
  edit.edited_text = "Corrected statement.";
  auto edited = f.service.decide(id, edit);
  CHECK(edited.version == 3);
  CHECK(edited.edited_text == "Corrected statement.");
  CHECK(f.service.get_statement(id).effective_text() == "Corrected statement.");

  auto back = f.service.decide(id, request(Decision::pending, 3));
  CHECK(back.version == 4);
  CHECK_FALSE(back.edited_text.has_value());
  CHECK_FALSE(back.decided_at.has_value());

  auto log = f.service.audit(id);
  REQUIRE(log.size() == 3);
  CHECK(log[0].from_decision == Decision::pending);
  CHECK(log[0].to_decision == Decision::accepted);
  CHECK(log[1].to_decision == Decision::edited);
  CHECK(log[1].actor == "editor");
  CHECK(log[2].to_decision == Decision::pending);
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(log[i].version == static_cast<int>(i) + 2);
    if (i) CHECK(log[i].at > log[i - 1].at);
    if (i) CHECK(log[i].from_decision == log[i - 1].to_decision);
  }
  CHECK(f.store->check_integrity().ok);
}

TEST_CASE("racing decisions: exactly one wins per version") {
  Fixture f;
  auto id = f.service.submit_document(plain(snippet_one())).records.at(0).statement.id;
  std::atomic<int> wins{0};
  std::atomic<int> conflicts{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 12; ++i) {
    threads.emplace_back([&, i] {
      try {
        f.service.decide(id, request(i % 2 ? Decision::accepted : Decision::rejected, 1));
        ++wins;
      } catch (const das::Error& e) {
        if (e.code() == ErrorCode::VersionConflict) ++conflicts;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(wins == 1);
  CHECK(conflicts == 11);
  CHECK(f.service.audit(id).size() == 1);
  CHECK(f.store->check_integrity().ok);
}

TEST_CASE("export agrees with list") {
  Fixture f;
  CHECK(f.service.export_csv({}) == std::string(das::kCsvHeader) + "\r\n");

  for (const auto& p : positives()) {
    f.service.submit_document(plain(testing::slurp(p), "Title, with \"quotes\"\n" + p.stem().string()));
  }
  auto page = f.service.list_statements({}, {1, 200});
  auto first = page.items.at(0).statement.id;
  auto edit = request(Decision::edited, 1);
  edit.edited_text = "Edited, \"text\"\nwith a newline";
  f.service.decide(first, edit);

  for (std::optional<Decision> d : {std::optional<Decision>{}, std::optional{Decision::pending},
                                    std::optional{Decision::edited}}) {
    das::StatementFilter filter;
    filter.decision = d;
    auto rows = testing::parse_csv(f.service.export_csv(filter));
    std::vector<das::StatementRecord> listed;
    for (int n = 1;; ++n) {
      auto p = f.service.list_statements(filter, {n, 7});
      if (p.items.empty()) break;
      listed.insert(listed.end(), p.items.begin(), p.items.end());
    }
    REQUIRE(rows.size() == listed.size() + 1);
    CHECK(rows[0] == testing::parse_csv(std::string(das::kCsvHeader) + "\r\n")[0]);
    for (std::size_t i = 0; i < listed.size(); ++i) {
      CHECK(rows[i + 1] == das::csv_fields(listed[i]));
      CHECK(rows[i + 1][2] == listed[i].effective_text());
    }
  }
  auto edited_rows = testing::parse_csv(f.service.export_csv({std::nullopt, Decision::edited, {}, {}}));
  REQUIRE(edited_rows.size() == 2);
  CHECK(edited_rows[1][2] == "Edited, \"text\"\nwith a newline");
}

TEST_CASE("store survives reopen") {
  TempDir dir;
  auto path = (dir / "s.db").string();
  std::string id;
  {
    auto store = std::make_shared<das::SqliteStore>(path);
    das::CurationService service(das::builtin_config(), store);
    id = service.submit_document(plain(snippet_one())).records.at(0).statement.id;
    service.decide(id, request(Decision::accepted, 1));
  }
  auto store = std::make_shared<das::SqliteStore>(path);
  das::CurationService service(das::builtin_config(), store);
  auto r = service.get_statement(id);
  CHECK(r.curation.decision == Decision::accepted);
  CHECK(r.curation.version == 2);
  CHECK_FALSE(service.submit_document(plain(snippet_one())).created);
  CHECK(store->check_integrity().ok);
}
