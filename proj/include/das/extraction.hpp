#pragma once

#include <map>
#include <string>
#include <vector>

#include "das/config.hpp"
#include "das/document.hpp"
#include "das/links.hpp"

namespace das {

struct PhraseCount {
  std::string phrase;
  int count = 0;
  int weight = 0;

  bool operator==(const PhraseCount&) const = default;
};

struct PrefilterResult {
  std::string document_id;
  int score = 0;  // sum of count * weight
  std::vector<PhraseCount> matched;
};

struct CandidateSpan {
  Span span;
  std::vector<std::string> trigger_phrases;
  bool in_availability_section = false;
  std::size_t section_index = 0;
  std::size_t first_sentence = 0;
  std::size_t sentence_count = 0;
};

using VoteTally = std::map<Category, int>;

struct RuleMatchReport {
  std::vector<std::string> matched_rule_ids;
  int total_score = 0;
  VoteTally vote_tally;
};

struct DataAccessStatement {
  std::string id;
  std::string document_id;
  Span span;
  std::string text;
  Category category = Category::unspecified_present;
  std::vector<ResourceLink> links;
  int score = 0;
  double confidence = 0.0;
  std::vector<std::string> matched_rules;
};

struct ExtractionResult {
  std::string document_id;
  PrefilterResult prefilter;
  bool passed_prefilter = false;
  std::vector<DataAccessStatement> statements;
  std::string config_fingerprint;
};

// Whole-word, case-insensitive occurrences of a lowercase phrase in
// `lowered[begin, end)`. A space in the phrase matches any whitespace run.
int count_phrase(std::u32string_view lowered, std::size_t begin, std::size_t end,
                 std::u32string_view phrase);

PrefilterResult prefilter_score(const Document& document, const ExtractionConfig& config);

// Caller is expected to have checked the prefilter threshold.
std::vector<CandidateSpan> find_candidates(const Document& document,
                                           const ExtractionConfig& config);

RuleMatchReport apply_rules(const CandidateSpan& candidate, const Document& document,
                            const ExtractionConfig& config);

double score_to_confidence(int score, const ExtractionConfig& config);

// Highest vote wins; ties resolve not_available > on_request >
// restricted_conditional > repository_deposited > in_paper_or_supplement.
// No positive vote means unspecified_present.
Category classify(const VoteTally& tally);

std::string statement_id(const std::string& document_id, Span span);

ExtractionResult extract(const Document& document, const ExtractionConfig& config);

}  // namespace das
