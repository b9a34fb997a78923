#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "das/config.hpp"
#include "das/extraction.hpp"
#include "das/ingest.hpp"

namespace das {

struct BatchInput {
  std::filesystem::path path;
  SourceFormat format = SourceFormat::plain_text;
};

struct BatchOutcome {
  std::string source;
  std::optional<ExtractionResult> result;
  std::string error;  // set when result is empty
};

// .pdf is pdf, .json is sectioned, anything else plain text.
SourceFormat format_for_path(const std::filesystem::path& path);

// Expands directories recursively to their .txt, .json and .pdf files,
// skipping gold label files. Named files are kept as given, even when
// missing, so that they surface as per-file errors. Sorted by path.
std::vector<BatchInput> collect_inputs(const std::vector<std::filesystem::path>& paths,
                                       std::optional<SourceFormat> format_override);

std::string read_file(const std::filesystem::path& path);

// Extracts every input on `jobs` worker threads. Outcomes keep input order.
std::vector<BatchOutcome> run_batch(const std::vector<BatchInput>& inputs,
                                    const ExtractionConfig& config, const IngestOptions& options,
                                    int jobs);

// The ExtractionResult object plus a "source" member, no trailing newline.
std::string jsonl_line(const BatchOutcome& outcome);

}  // namespace das
