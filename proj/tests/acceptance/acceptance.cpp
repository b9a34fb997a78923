// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <httplib.h>

#include <atomic>
#include <cstdarg>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "das/csv.hpp"
#include "das/extraction.hpp"
#include "das/json.hpp"
#include "das/records.hpp"
#include "das/store.hpp"
#include "das/unicode.hpp"
#include "fuzz.hpp"
#include "test_support.hpp"

using nlohmann::json;
using testing::run_command;

namespace fs = std::filesystem;

namespace {

const std::string kCli = DAS_CLI_PATH;
const fs::path kCorpus = DAS_CORPUS_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

std::vector<fs::path> corpus_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.path().extension() == ".txt") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

json plain_payload(const fs::path& file) {
  return json{{"format", "plain"},
              {"content", testing::slurp(file)},
              {"metadata", {{"title", file.stem().string()}}}};
}

// A `das serve` child on a free port.
class Server {
 public:
  Server(const fs::path& store, const fs::path& log)
      : child_({kCli, "serve", "--addr", "127.0.0.1:0", "--store", store.string()}, log) {
    port_ = child_.wait_for_port();
    if (port_ <= 0) throw std::runtime_error("server did not start: " + testing::slurp(log));
  }
  int port() const { return port_; }
  testing::Child& child() { return child_; }
  std::unique_ptr<httplib::Client> client() const {
    auto c = std::make_unique<httplib::Client>("127.0.0.1", port_);
    c->set_read_timeout(30, 0);
    return c;
  }

 private:
  testing::Child child_;
  int port_ = -1;
};

// ---------------------------------------------------------------------------

Verdict quality_gate() {
  testing::TempDir dir;
  std::map<std::string, int> per_category;
  int negatives = 0;
  auto files = corpus_files(kCorpus);
  for (const auto& f : files) {
    auto gold = json::parse(testing::slurp(fs::path(f).replace_extension(".gold.json")));
    if (gold["spans"].empty()) ++negatives;
    std::set<std::string> cats;
    for (const auto& s : gold["spans"]) cats.insert(s["category"].get<std::string>());
    for (const auto& c : cats) ++per_category[c];
  }
  int smallest = per_category.size() == 6 ? 1 << 30 : 0;
  for (const auto& [c, n] : per_category) smallest = std::min(smallest, n);

  auto started = std::chrono::steady_clock::now();
  auto r = run_command({kCli, "eval", kCorpus.string(), "--output", (dir / "report.json").string()});
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (r.exit_code != 0) return {false, "eval exited " + std::to_string(r.exit_code) + ": " + r.err};
  auto report = json::parse(testing::slurp(dir / "report.json"));
  double precision = report["overall"]["precision"];
  double recall = report["overall"]["recall"];
  bool ok = files.size() >= 60 && smallest >= 5 && negatives >= 20 && recall >= 0.85 &&
            precision >= 0.85 && seconds < 5.0;
  return {ok, fmt("recall=%.3f precision=%.3f eval=%.2fs docs=%zu negatives=%d min_per_category=%d",
                  recall, precision, seconds, files.size(), negatives, smallest)};
}

Verdict two_stage_contract() {
  auto config = das::builtin_config();
  int violations = 0;
  int with_statements = 0;
  int documents = 0;
  auto check = [&](const std::string& text) {
    auto result = das::extract(testing::make_document(text), config);
    ++documents;
    if (result.statements.empty()) return;
    ++with_statements;
    if (!result.passed_prefilter || result.prefilter.score < config.prefilter_threshold) ++violations;
  };
  for (const auto& f : corpus_files(kCorpus)) check(testing::slurp(f));
  testing::DocumentFuzzer fuzz(1000);
  for (int i = 0; i < 1000; ++i) check(fuzz.next());
  return {violations == 0 && documents == 1060,
          fmt("violations=%d documents=%d with_statements=%d", violations, documents, with_statements)};
}

Verdict link_fidelity() {
  testing::LinkFuzzer fuzz(20240601);
  int planted_total = 0;
  int missing = 0;
  int raw_mismatch = 0;
  for (int i = 0; i < 200; ++i) {
    std::vector<testing::PlantedLink> planted;
    auto doc = testing::make_document(fuzz.document(fuzz.between(1, 6), planted));
    auto text = das::unicode::to_utf8(doc.text);
    std::set<std::string> found;
    for (const auto& link : das::extract_links(doc.text)) {
      found.insert(link.canonical);
      if (doc.slice_utf8(link.span) != link.raw || text.find(link.raw) == std::string::npos) {
        ++raw_mismatch;
      }
    }
    for (const auto& p : planted) {
      ++planted_total;
      if (!found.count(p.canonical)) ++missing;
    }
  }
  return {missing == 0 && raw_mismatch == 0,
          fmt("documents=200 planted=%d missing=%d raw_mismatches=%d", planted_total, missing,
              raw_mismatch)};
}

Verdict determinism() {
  testing::TempDir dir;
  std::vector<std::vector<std::string>> runs = {
      {kCli, "extract", kCorpus.string(), "--output", (dir / "1.jsonl").string()},
      {kCli, "extract", kCorpus.string(), "--output", (dir / "2.jsonl").string()},
      {kCli, "extract", kCorpus.string(), "--jobs", "4", "--output", (dir / "3.jsonl").string()}};
  for (const auto& argv : runs) {
    auto r = run_command(argv);
    if (r.exit_code != 0) return {false, "extract failed: " + r.err};
  }
  auto first = testing::slurp(dir / "1.jsonl");
  int diffs = (first != testing::slurp(dir / "2.jsonl")) + (first != testing::slurp(dir / "3.jsonl"));
  auto lines = std::count(first.begin(), first.end(), '\n');
  return {diffs == 0 && lines == 60, fmt("runs=3 (one with --jobs 4) lines=%ld diffs=%d", lines, diffs)};
}

Verdict csv_round_trip() {
  std::mt19937 rng(4180);
  static const std::vector<std::string> kPieces = {
      "data", " ", ",", "\"", "\n", "\r\n", "|", "a|b", "\"quoted, with comma\"", "na\xC3\xAFve",
      "", "x", "\t", ";"};
  auto text = [&] {
    std::string out;
    int n = std::uniform_int_distribution<int>(0, 10)(rng);
    for (int i = 0; i < n; ++i) out += kPieces[std::uniform_int_distribution<std::size_t>(0, kPieces.size() - 1)(rng)];
    return out;
  };
  std::vector<das::StatementRecord> records;
  std::vector<std::vector<std::string>> expected;
  for (int i = 0; i < 1000; ++i) {
    das::StatementRecord r;
    r.statement.document_id = "doc," + std::to_string(i) + "\"";
    r.statement.text = text();
    r.statement.category = das::kAllCategories[static_cast<std::size_t>(i % 6)];
    r.statement.score = 5 + i % 20;
    r.statement.confidence = r.statement.score / (r.statement.score + 5.0);
    std::string links;
    for (int k = 0; k < i % 3; ++k) {
      das::ResourceLink l;
      l.canonical = "https://osf.io/" + std::to_string(i) + "?q=" + std::to_string(k) + "%7C1";
      links += (k ? "|" : "") + l.canonical;
      r.statement.links.push_back(l);
    }
    if (i % 2) r.document_metadata.title = text();
    std::string decided;
    if (i % 4 == 1) {
      r.curation.decision = das::Decision::edited;
      r.curation.edited_text = text() + "|edited\n";
    }
    if (i % 4) {
      if (i % 4 != 1) r.curation.decision = das::Decision::accepted;
      r.curation.decided_at = 1760000000000000 + i;
      decided = das::format_timestamp(*r.curation.decided_at);
    }
    expected.push_back({r.statement.document_id, r.document_metadata.title.value_or(""),
                        r.curation.edited_text.value_or(r.statement.text),
                        std::string(das::to_string(r.statement.category)), links,
                        std::to_string(r.statement.score), "",
                        std::string(das::to_string(r.curation.decision)), decided});
    records.push_back(std::move(r));
  }
  std::vector<std::vector<std::string>> rows;
  try {
    rows = testing::parse_csv(das::records_to_csv(records));
  } catch (const std::exception& e) {
    return {false, std::string("parse failed: ") + e.what()};
  }
  if (rows.size() != records.size() + 1) return {false, fmt("rows=%zu", rows.size())};
  int mismatches = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& row = rows[i + 1];
    if (row.size() != 9) {
      mismatches += 9;
      continue;
    }
    for (std::size_t k = 0; k < 9; ++k) {
      if (k == 6) {
        if (std::stod(row[k]) != records[i].statement.confidence) ++mismatches;
      } else if (row[k] != expected[i][k]) {
        ++mismatches;
      }
    }
  }
  return {mismatches == 0, fmt("records=1000 field_mismatches=%d", mismatches)};
}

Verdict api_workflow() {
  testing::TempDir dir;
  Server server(dir / "store.db", dir / "log");
  auto client = server.client();
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
    return ok;
  };
  auto post = [&](const std::string& path, const json& body) {
    return client->Post(path, body.dump(), "application/json");
  };

  auto positives = corpus_files(kCorpus / "positives");
  std::string doc_id;
  std::string statement_id;
  for (const auto& f : positives) {
    auto res = post("/v1/documents", plain_payload(f));
    if (!expect(res && res->status == 201, "submit " + f.filename().string())) continue;
    auto body = json::parse(res->body);
    if (doc_id.empty()) {
      doc_id = body["document_id"];
      statement_id = body["records"][0]["statement"]["id"];
    }
  }
  auto again = post("/v1/documents", plain_payload(positives.front()));
  expect(again && again->status == 200, "resubmit returns 200");
  if (again) {
    auto body = json::parse(again->body);
    expect(body["document_id"] == doc_id, "resubmit keeps document id");
    expect(body["records"][0]["statement"]["id"] == statement_id, "resubmit keeps record id");
  }

  auto list = client->Get("/v1/statements?decision=pending&page_size=200");
  if (expect(list && list->status == 200, "list")) {
    auto body = json::parse(list->body);
    expect(body["total"] == 30, "30 pending statements, no duplicates");
    expect(body["items"].size() == 30, "30 items on one page");
  }

  json accept{{"decision", "accepted"}, {"actor", "acceptance"}, {"expected_version", 1}};
  auto decided = post("/v1/statements/" + statement_id + "/decision", accept);
  if (expect(decided && decided->status == 200, "decide accepted")) {
    auto body = json::parse(decided->body);
    expect(body["decision"] == "accepted" && body["version"] == 2, "accepted at version 2");
  }
  auto stale = post("/v1/statements/" + statement_id + "/decision", accept);
  if (expect(stale && stale->status == 409, "stale decide conflicts")) {
    expect(json::parse(stale->body)["error_code"] == "VersionConflict", "VersionConflict body");
  }

  auto csv = client->Get("/v1/export.csv");
  if (expect(csv && csv->status == 200, "export")) {
    auto rows = testing::parse_csv(csv->body);
    expect(rows.size() == 31, "export has 30 rows");
    int accepted = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) accepted += rows[i].size() == 9 && rows[i][7] == "accepted";
    expect(accepted == 1, "export shows the accepted decision");
  }
  auto only = client->Get("/v1/export.csv?decision=accepted");
  expect(only && testing::parse_csv(only->body).size() == 2, "filtered export");

  server.child().signal(SIGTERM);
  expect(server.child().wait() == 0, "clean shutdown");
  std::string detail = "submit(30) resubmit list decide stale-decide export";
  for (const auto& f : failures) detail += "; failed: " + f;
  return {failures.empty(), detail};
}

// Checks the audit trail of every statement through a fresh server.
std::string verify_store(const fs::path& store, const fs::path& log,
                         const std::set<std::pair<std::string, int>>& acknowledged,
                         std::size_t expected_statements) {
  Server server(store, log);
  auto client = server.client();
  auto list = client->Get("/v1/statements?page_size=200");
  if (!list || list->status != 200) return "list after restart failed";
  auto items = json::parse(list->body)["items"];
  if (items.size() != expected_statements) return fmt("statements after restart=%zu", items.size());
  std::set<std::pair<std::string, int>> logged;
  for (const auto& item : items) {
    std::string id = item["statement"]["id"];
    int version = item["curation"]["version"];
    auto res = client->Get("/v1/statements/" + id + "/audit");
    if (!res || res->status != 200) return "audit read failed for " + id;
    auto entries = json::parse(res->body)["items"];
    std::string previous_at;
    std::string previous_to = "pending";
    int expect_version = 2;
    for (const auto& e : entries) {
      if (e["version"] != expect_version) return "version gap in " + id;
      if (e["from_decision"] != previous_to) return "broken decision chain in " + id;
      std::string at = e["at"];
      if (!previous_at.empty() && !(at > previous_at)) return "non-monotone audit time in " + id;
      previous_at = at;
      previous_to = e["to_decision"];
      logged.insert({id, expect_version});
      ++expect_version;
    }
    if (expect_version - 1 != version) return "final version mismatch in " + id;
    if (item["curation"]["decision"] != previous_to) return "final decision mismatch in " + id;
  }
  for (const auto& ack : acknowledged) {
    if (!logged.count(ack)) return "acknowledged decision lost: " + ack.first;
  }
  server.child().signal(SIGTERM);
  server.child().wait();
  das::SqliteStore direct(store.string());
  auto integrity = direct.check_integrity();
  if (!integrity.ok) return "integrity: " + integrity.problems.front();
  return "";
}

struct Burst {
  int completed = 0;
  int ok = 0;
  int conflicts = 0;
  int other = 0;
  std::set<std::pair<std::string, int>> acknowledged;
};

// 100 decisions from 20 concurrent clients over a few hot statements.
// `on_progress` runs after each completed request.
Burst decision_burst(int port, const std::vector<std::string>& ids,
                     const std::function<void(int)>& on_progress) {
  Burst burst;
  std::mutex mu;
  std::atomic<int> done{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 20; ++t) {
    threads.emplace_back([&, t] {
      httplib::Client client("127.0.0.1", port);
      client.set_read_timeout(10, 0);
      std::mt19937 rng(static_cast<unsigned>(t));
      static const char* kDecisions[] = {"accepted", "rejected", "pending", "edited"};
      for (int k = 0; k < 5; ++k) {
        const auto& id = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)];
        int version = 1;
        if (auto cur = client.Get("/v1/statements/" + id); cur && cur->status == 200) {
          version = json::parse(cur->body)["curation"]["version"];
        }
        std::string decision = kDecisions[(t + k) % 4];
        json body{{"decision", decision}, {"actor", "burst-" + std::to_string(t)},
                  {"expected_version", version}};
        if (decision == "edited") body["edited_text"] = "edited by " + std::to_string(t);
        auto res = client.Post("/v1/statements/" + id + "/decision", body.dump(), "application/json");
        {
          std::lock_guard lock(mu);
          if (res && res->status == 200) {
            ++burst.ok;
            burst.acknowledged.insert({id, json::parse(res->body)["version"].get<int>()});
          } else if (res && res->status == 409) {
            ++burst.conflicts;
          } else {
            ++burst.other;
          }
        }
        on_progress(++done);
      }
    });
  }
  for (auto& th : threads) th.join();
  burst.completed = done;
  return burst;
}

Verdict crash_safety() {
  testing::TempDir dir;
  auto store = dir / "store.db";
  std::vector<std::string> ids;
  {
    Server seed(store, dir / "seed.log");
    auto client = seed.client();
    for (const auto& f : corpus_files(kCorpus / "positives")) {
      auto res = client->Post("/v1/documents", plain_payload(f).dump(), "application/json");
      if (!res || res->status != 201) return {false, "seeding failed"};
      auto body = json::parse(res->body);
      if (ids.size() < 8) ids.push_back(body["records"][0]["statement"]["id"]);
    }
    seed.child().signal(SIGTERM);
    seed.child().wait();
  }

  // Phase 1: SIGKILL once 40 of 100 decisions have completed.
  Burst killed;
  {
    Server server(store, dir / "kill.log");
    std::atomic<bool> fired{false};
    pid_t pid = server.child().pid();
    killed = decision_burst(server.port(), ids, [&](int n) {
      if (n >= 40 && !fired.exchange(true)) ::kill(pid, SIGKILL);
    });
    server.child().wait();
  }
  auto problem = verify_store(store, dir / "verify1.log", killed.acknowledged, 30);
  if (!problem.empty()) return {false, "after SIGKILL: " + problem};

  // Phase 2: SIGTERM mid-burst must shut down cleanly.
  Burst termed;
  int term_exit = -1;
  {
    Server server(store, dir / "term.log");
    std::atomic<bool> fired{false};
    pid_t pid = server.child().pid();
    termed = decision_burst(server.port(), ids, [&](int n) {
      if (n >= 40 && !fired.exchange(true)) ::kill(pid, SIGTERM);
    });
    term_exit = server.child().wait();
  }
  problem = verify_store(store, dir / "verify2.log", termed.acknowledged, 30);
  if (!problem.empty()) return {false, "after SIGTERM: " + problem};
  if (term_exit != 0) return {false, fmt("SIGTERM exit status %d", term_exit)};

  bool mid_burst = killed.other > 0;
  return {mid_burst,
          fmt("kill: ok=%d conflicts=%d cut=%d; term: ok=%d conflicts=%d cut=%d exit=%d; "
              "versions gapless, audit monotone, acknowledged writes durable, integrity ok",
              killed.ok, killed.conflicts, killed.other, termed.ok, termed.conflicts, termed.other,
              term_exit)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {"quality-gate", quality_gate},       {"two-stage-contract", two_stage_contract},
      {"link-fidelity", link_fidelity},     {"determinism", determinism},
      {"csv-round-trip", csv_round_trip},   {"api-workflow", api_workflow},
      {"crash-safety", crash_safety},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed ? 1 : 0;
}
