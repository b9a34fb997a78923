// das: batch extraction, evaluation, the curation API server and CSV export.

#include <CLI11.hpp>
#include <httplib.h>
#include <pthread.h>
#include <signal.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "das/batch.hpp"
#include "das/config.hpp"
#include "das/error.hpp"
#include "das/eval.hpp"
#include "das/http_api.hpp"
#include "das/service.hpp"
#include "das/store.hpp"

namespace {

struct CommonOptions {
  std::string config = "builtin";
  std::string converter;
};

das::IngestOptions ingest_options(const das::ExtractionConfig& config, const CommonOptions& common) {
  das::IngestOptions options;
  options.heading_lexicon = config.heading_lexicon;
  options.converter_command = common.converter;
  return options;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw std::runtime_error("cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw std::runtime_error("write failed");
  }

 private:
  std::ofstream file_;
};

int run_extract(const CommonOptions& common, const std::vector<std::string>& paths,
                const std::string& format, const std::string& output, int jobs) {
  auto config = das::load_config(common.config);
  std::optional<das::SourceFormat> format_override;
  if (!format.empty()) format_override = das::parse_source_format(format);

  std::vector<std::filesystem::path> roots(paths.begin(), paths.end());
  auto inputs = das::collect_inputs(roots, format_override);
  auto outcomes = das::run_batch(inputs, config, ingest_options(config, common), jobs);

  Output out(output);
  int failures = 0;
  for (const auto& outcome : outcomes) {
    if (!outcome.result) {
      std::cerr << "error: " << outcome.source << ": " << outcome.error << "\n";
      ++failures;
      continue;
    }
    out.stream() << das::jsonl_line(outcome) << "\n";
  }
  out.finish();
  if (failures) std::cerr << failures << " of " << outcomes.size() << " inputs failed\n";
  return failures ? 1 : 0;
}

int run_eval(const CommonOptions& common, const std::string& corpus, const std::string& output) {
  auto started = std::chrono::steady_clock::now();
  auto config = das::load_config(common.config);
  auto report = das::evaluate_corpus(corpus, config, ingest_options(config, common));
  std::cout << das::format_report(report);
  if (output != "-") {
    Output out(output);
    out.stream() << to_json(report).dump(2) << "\n";
    out.finish();
  }
  auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
  std::cerr << "eval finished in " << elapsed.count() << " s\n";
  return 0;
}

std::pair<std::string, int> split_addr(const std::string& addr) {
  auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw std::runtime_error("address must be host:port");
  std::string host = addr.substr(0, colon);
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(addr.substr(colon + 1), &used);
    if (used != addr.size() - colon - 1) throw std::invalid_argument("port");
  } catch (const std::exception&) {
    throw std::runtime_error("bad port in '" + addr + "'");
  }
  if (port < 0 || port > 65535) throw std::runtime_error("port out of range in '" + addr + "'");
  if (host.empty()) host = "127.0.0.1";
  return {host, port};
}

int run_serve(const CommonOptions& common, const std::string& addr, const std::string& store_path,
              const std::string& static_dir) {
  auto [host, port] = split_addr(addr);
  auto config = das::load_config(common.config);
  auto store = std::make_shared<das::SqliteStore>(store_path);
  das::CurationService service(config, store, common.converter);
  das::ApiServer server(service);
  if (!static_dir.empty()) server.mount_static(static_dir);

  // Signals are taken synchronously by one thread, so block them before
  // the server spawns its workers.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGINT);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  int bound = server.bind(host, port);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  std::cout << "listening on " << host << ":" << bound << std::endl;
  try {
    server.run();
  } catch (...) {
    kill(getpid(), SIGTERM);
    waiter.join();
    throw;
  }
  kill(getpid(), SIGTERM);  // release the waiter if the server stopped on its own
  waiter.join();
  store->checkpoint();
  std::cerr << "server stopped\n";
  return 0;
}

int run_export(const std::string& url, const das::QueryParams& filters, const std::string& output) {
  httplib::Client client(url);
  client.set_read_timeout(60, 0);
  httplib::Params params(filters.begin(), filters.end());
  auto res = client.Get("/v1/export.csv", params, httplib::Headers{});
  if (!res) throw std::runtime_error("cannot reach " + url + ": " + httplib::to_string(res.error()));
  if (res->status != 200) {
    std::cerr << "error: HTTP " << res->status << ": " << res->body << "\n";
    return 1;
  }
  Output out(output);
  out.stream() << res->body;
  out.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data access statement extraction and curation"};
  app.require_subcommand(1);
  CommonOptions common;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", common.config, "builtin or a JSON config path")
        ->envname("DAS_CONFIG");
    cmd->add_option("--converter", common.converter,
                    "PDF to text command; {input} is the PDF path")
        ->envname("DAS_CONVERTER");
  };

  std::vector<std::string> extract_paths;
  std::string extract_format;
  std::string extract_output;
  int jobs = 1;
  auto* extract = app.add_subcommand("extract", "Extract statements, one JSON line per input");
  add_common(extract);
  extract->add_option("paths", extract_paths, "Files or directories")->required();
  extract->add_option("--format", extract_format, "plain|sectioned|pdf (default: by extension)");
  extract->add_option("--output", extract_output, "Output file (default: stdout)");
  extract->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string corpus;
  std::string eval_output = "eval-report.json";
  auto* eval = app.add_subcommand("eval", "Score the pipeline against a labeled corpus");
  add_common(eval);
  eval->add_option("corpus", corpus, "Corpus directory")->required();
  eval->add_option("--output", eval_output, "JSON report path; - to skip the file");

  std::string addr = "127.0.0.1:8080";
  std::string store_path = "das.sqlite";
  auto* serve = app.add_subcommand("serve", "Run the curation API");
  add_common(serve);
  serve->add_option("--addr", addr, "host:port; port 0 picks a free port")->envname("DAS_ADDR");
  serve->add_option("--store", store_path, "SQLite store path")->envname("DAS_STORE");
  std::string static_dir;
  serve->add_option("--static", static_dir, "Directory of static assets served at /")
      ->envname("DAS_STATIC");

  std::string url = "http://127.0.0.1:8080";
  std::string export_output;
  std::string category, decision, min_confidence, document_id;
  auto* exporter = app.add_subcommand("export", "Download the CSV export from a running server");
  exporter->add_option("--url", url, "Server base URL")->envname("DAS_URL");
  exporter->add_option("--category", category);
  exporter->add_option("--decision", decision);
  exporter->add_option("--min-confidence", min_confidence);
  exporter->add_option("--document-id", document_id);
  exporter->add_option("--output", export_output, "Output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) return run_extract(common, extract_paths, extract_format, extract_output, jobs);
    if (*eval) return run_eval(common, corpus, eval_output);
    if (*serve) return run_serve(common, addr, store_path, static_dir);
    if (*exporter) {
      das::QueryParams filters;
      if (!category.empty()) filters.emplace("category", category);
      if (!decision.empty()) filters.emplace("decision", decision);
      if (!min_confidence.empty()) filters.emplace("min_confidence", min_confidence);
      if (!document_id.empty()) filters.emplace("document_id", document_id);
      return run_export(url, filters, export_output);
    }
  } catch (const das::Error& e) {
    std::cerr << "error: " << das::to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
