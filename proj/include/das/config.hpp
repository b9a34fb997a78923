#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace das {

enum class Category {
  repository_deposited,
  on_request,
  in_paper_or_supplement,
  restricted_conditional,
  not_available,
  unspecified_present,
};

inline constexpr std::array<Category, 6> kAllCategories = {
    Category::repository_deposited,   Category::on_request,
    Category::in_paper_or_supplement, Category::restricted_conditional,
    Category::not_available,          Category::unspecified_present};

std::string_view to_string(Category category);
std::optional<Category> parse_category(std::string_view name);

struct LexiconEntry {
  std::string phrase;  // stored lowercase
  int weight = 1;
};

struct Rule {
  std::string id;
  std::string pattern;  // ECMAScript, matched case-insensitively
  int score = 0;
  std::map<Category, int> votes;
  bool requires_link = false;
  // Only fires for candidates inside an availability-headed section.
  bool requires_availability_section = false;

  // Compiled form of `pattern`; shared between config copies.
  std::shared_ptr<const std::regex> regex;
};

struct ExtractionConfig {
  std::vector<LexiconEntry> lexicon;
  std::vector<std::string> heading_lexicon;
  int prefilter_threshold = 4;
  std::vector<Rule> rules;
  int accept_threshold = 5;
  double confidence_k = 5.0;
  int max_statement_sentences = 5;

  // Hex digest of the canonical JSON form.
  std::string fingerprint() const;
};

// The embedded defaults.
ExtractionConfig builtin_config();

// `source` is either "builtin" or a path to a JSON config document. Fields
// missing from the document keep their builtin values.
// Throws Error(ConfigInvalid) naming the offending field or rule id.
ExtractionConfig load_config(const std::string& source);

ExtractionConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExtractionConfig& config);

// Compiles every rule pattern and checks invariants. Throws ConfigInvalid.
void validate(ExtractionConfig& config);

}  // namespace das
