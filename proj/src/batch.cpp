#include "das/batch.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "das/error.hpp"
#include "das/json.hpp"

namespace das {

namespace fs = std::filesystem;

namespace {

bool is_gold_file(const fs::path& path) {
  const std::string name = path.filename().string();
  constexpr std::string_view kSuffix = ".gold.json";
  return name.size() >= kSuffix.size() &&
         name.compare(name.size() - kSuffix.size(), kSuffix.size(), kSuffix) == 0;
}

bool is_document_file(const fs::path& path) {
  auto ext = path.extension().string();
  return (ext == ".txt" || ext == ".json" || ext == ".pdf") && !is_gold_file(path);
}

}  // namespace

SourceFormat format_for_path(const fs::path& path) {
  auto ext = path.extension().string();
  if (ext == ".pdf") return SourceFormat::pdf;
  if (ext == ".json") return SourceFormat::sectioned;
  return SourceFormat::plain_text;
}

std::vector<BatchInput> collect_inputs(const std::vector<fs::path>& paths,
                                       std::optional<SourceFormat> format_override) {
  std::vector<fs::path> files;
  for (const auto& path : paths) {
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
      for (auto it = fs::recursive_directory_iterator(path, ec);
           !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (it->is_regular_file(ec) && is_document_file(it->path())) files.push_back(it->path());
      }
      if (ec) files.push_back(path);  // reported when read
    } else {
      files.push_back(path);
    }
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());

  std::vector<BatchInput> inputs;
  inputs.reserve(files.size());
  for (auto& file : files) {
    SourceFormat format = format_override.value_or(format_for_path(file));
    inputs.push_back({std::move(file), format});
  }
  return inputs;
}

std::string read_file(const fs::path& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) throw std::runtime_error(path.string() + ": is a directory");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw std::runtime_error(path.string() + ": read error");
  return buf.str();
}

std::vector<BatchOutcome> run_batch(const std::vector<BatchInput>& inputs,
                                    const ExtractionConfig& config, const IngestOptions& options,
                                    int jobs) {
  std::vector<BatchOutcome> outcomes(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      auto& out = outcomes[i];
      out.source = inputs[i].path.generic_string();
      try {
        InputDescriptor descriptor;
        descriptor.format = inputs[i].format;
        descriptor.content = read_file(inputs[i].path);
        out.result = extract(load_document(descriptor, options), config);
      } catch (const Error& e) {
        out.error = std::string(to_string(e.code())) + ": " + e.what();
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };
  std::size_t threads = static_cast<std::size_t>(std::max(jobs, 1));
  threads = std::min(threads, std::max<std::size_t>(inputs.size(), 1));
  if (threads == 1) {
    worker();
    return outcomes;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return outcomes;
}

std::string jsonl_line(const BatchOutcome& outcome) {
  nlohmann::json j = *outcome.result;
  j["source"] = outcome.source;
  return j.dump();
}

}  // namespace das
