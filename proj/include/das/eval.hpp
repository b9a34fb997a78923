#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "das/config.hpp"
#include "das/extraction.hpp"
#include "das/ingest.hpp"

namespace das {

struct GoldSpan {
  Span span;
  Category category = Category::unspecified_present;
  std::vector<std::string> links;
};

// {"spans": [{start, end, category, links[]}]}. Throws CorpusInvalid.
std::vector<GoldSpan> parse_gold(const nlohmann::json& doc);

enum class Outcome { tp, fp, fn, tn, wrong };

std::string_view to_string(Outcome outcome);

struct DocumentScore {
  std::string name;
  Outcome outcome = Outcome::tn;
  std::string gold_label;       // category of the first gold span, or "none"
  std::string predicted_label;  // see score_document
  std::set<Category> gold_categories;
  std::set<Category> predicted_categories;
  std::set<Category> matched_categories;
};

// tp: some statement overlaps a gold span of the same category.
// wrong: gold and statements exist but none match.
// predicted_label is the category of the first statement overlapping the
// first gold span, else of the first statement, else "none".
DocumentScore score_document(const std::string& name, const std::vector<GoldSpan>& gold,
                             const std::vector<DataAccessStatement>& statements);

struct Metrics {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
};

// Undefined ratios are reported as 1.0.
Metrics make_metrics(int tp, int fp, int fn);

struct EvalReport {
  std::size_t corpus_size = 0;
  std::map<Outcome, int> counts;
  // wrong counts against both precision and recall.
  Metrics overall;
  std::map<Category, Metrics> per_category;
  std::map<std::string, std::map<std::string, int>> confusion;  // gold -> predicted -> n
  std::string config_fingerprint;
  std::vector<DocumentScore> documents;
};

EvalReport summarize(std::vector<DocumentScore> documents, std::string config_fingerprint);

// Corpus layout: <name>.txt beside <name>.gold.json, in any subdirectory.
// Throws CorpusInvalid for missing labels, orphan labels, unreadable files,
// out-of-range spans, or an empty corpus.
EvalReport evaluate_corpus(const std::filesystem::path& dir, const ExtractionConfig& config,
                           const IngestOptions& options);

nlohmann::json to_json(const EvalReport& report);
std::string format_report(const EvalReport& report);

}  // namespace das
