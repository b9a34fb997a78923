#include "das/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "das/error.hpp"
#include "das/hash.hpp"
#include "das/ingest.hpp"
#include "das/unicode.hpp"

namespace das {

std::string_view to_string(Category category) {
  switch (category) {
    case Category::repository_deposited: return "repository_deposited";
    case Category::on_request: return "on_request";
    case Category::in_paper_or_supplement: return "in_paper_or_supplement";
    case Category::restricted_conditional: return "restricted_conditional";
    case Category::not_available: return "not_available";
    case Category::unspecified_present: return "unspecified_present";
  }
  return "unspecified_present";
}

std::optional<Category> parse_category(std::string_view name) {
  for (Category c : kAllCategories) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

namespace {

// Reason words that turn "not available" into a restricted-access statement.
constexpr const char* kReasons =
    "(ethic|privac|licen|confidential|consent|proprietar|sensitiv|legal|commercial|restrict)";

Rule make_rule(std::string id, std::string pattern, int score, std::map<Category, int> votes,
               bool requires_link = false, bool requires_section = false) {
  Rule r;
  r.id = std::move(id);
  r.pattern = std::move(pattern);
  r.score = score;
  r.votes = std::move(votes);
  r.requires_link = requires_link;
  r.requires_availability_section = requires_section;
  return r;
}

ExtractionConfig make_builtin() {
  ExtractionConfig c;
  c.lexicon = {
      {"data availability statement", 5},
      {"data availability", 5},
      {"data access statement", 5},
      {"availability of data and materials", 5},
      {"data and code availability", 5},
      {"data are available", 3},
      {"data is available", 3},
      {"datasets generated", 3},
      {"underlying data", 3},
      {"supporting data", 3},
      {"openly available", 3},
      {"data supporting the findings", 3},
      {"upon reasonable request", 2},
      {"deposited in", 2},
      {"publicly available", 2},
      {"accession number", 2},
      {"supplementary material", 2},
      {"supplementary information", 2},
      {"corresponding author", 2},
      {"zenodo", 1},
      {"dryad", 1},
      {"figshare", 1},
      {"dataverse", 1},
      {"osf.io", 1},
      {"genbank", 1},
      {"gene expression omnibus", 1},
      {"arrayexpress", 1},
      {"uk data service", 1},
      {"github", 1},
  };
  c.heading_lexicon = default_heading_lexicon();
  c.prefilter_threshold = 4;
  c.accept_threshold = 5;
  c.confidence_k = 5.0;
  c.max_statement_sentences = 5;

  using C = Category;
  c.rules = {
      make_rule("R-avail-repo",
                R"(\b(is|are|was|were|be|been)\s+((openly|publicly|freely|readily)\s+)?)"
                R"((available|deposited|archived|accessible|stored|hosted|released)\s+(online\s+)?)"
                R"((in|at|on|from|via|through)\b)"
                R"(|\bcan\s+be\s+(accessed|found|downloaded|obtained|retrieved)\s+(at|in|on|from|via)\b)",
                4, {{C::repository_deposited, 4}}),
      make_rule("R-on-request",
                R"(\b(available|obtained|provided|shared)\b[^.]{0,80}\b(up)?on\s+)"
                R"(((a\s+)?reasonable\s+|justified\s+)?request\b)"
                R"(|\b(up)?on\s+(reasonable\s+)?request\s+(from|to)\s+(the\s+)?)"
                R"((corresponding\s+|senior\s+|first\s+|lead\s+)?authors?\b)",
                4, {{C::on_request, 4}}),
      make_rule("R-in-paper",
                R"(\b(included|contained|provided|presented|reported|given)\s+(with)?in\s+(this|the)\s+)"
                R"((published\s+)?(article|paper|manuscript|main\s+text)\b)"
                R"(|\bwithin\s+(this|the)\s+(article|paper|manuscript)\b)"
                R"(|\bsupplementary\s+(materials?|information|data|files?|tables?|datasets?)\b)"
                R"(|\bsupporting\s+information\b|\bsupplement(al|ary)?\s+files?\b)",
                3, {{C::in_paper_or_supplement, 5}}),
      make_rule("R-restricted",
                std::string(R"(\bnot\s+((publicly|openly|freely)\s+)?(available|accessible|shared)\b[^.]{0,120}\b)") +
                    kReasons +
                    R"(|\b(cannot|can\s+not|could\s+not|may\s+not)\s+be\s+(shared|made\s+((publicly|openly)\s+)?available|released|deposited)\b[^.]{0,120}\b)" +
                    kReasons +
                    R"(|\b(ethic|privac|confidential|sensitiv)[a-z]*\b[^.]{0,80}\bnot\s+((publicly|openly)\s+)?(available|shared)\b)"
                    R"(|\brestrictions\s+apply\b|\bavailable\s+only\s+(to|under|upon|with)\b)"
                    R"(|\bdata\s+(access|use|sharing|transfer)\s+agreements?\b)"
                    R"(|\bavailable\s+with\s+(the\s+)?permission\b|\bunder\s+licen[cs]e\s+from\b)",
                3, {{C::restricted_conditional, 5}}),
      make_rule("R-no-data",
                R"(\bno\s+(new\s+)?(data|datasets?|data\s+sets)\s+(were|was|have\s+been|has\s+been|are|is)\s+)"
                R"((created|generated|collected|produced|analy[sz]ed|used|reported|obtained)\b)"
                R"(|\bdata\s+sharing\s+(is\s+)?not\s+applicable\b)"
                R"(|\bdid\s+not\s+(generate|create|collect|produce|analy[sz]e|use)\b[^.]{0,40}\b(data|datasets?)\b)",
                4, {{C::not_available, 6}}),
      make_rule("R-link", R"(\S)", 2, {{C::repository_deposited, 2}}, /*requires_link=*/true),
      make_rule("R-heading", R"(\S)", 3, {}, false, /*requires_section=*/true),
      make_rule("R-statement-label",
                R"(\b(data|code)\s+(availability|accessibility|access|sharing)\b)", 2, {}),
      make_rule("R-availability-assertion",
                R"(\bwill\s+be\s+(made\s+)?((publicly|openly|freely)\s+)?)"
                R"((available|shared|accessible|released|published|deposited)\b)"
                R"(|\b(are|is)\s+((publicly|openly|freely)\s+)?available\s*[.;])",
                2, {}),
  };
  validate(c);
  return c;
}

}  // namespace

ExtractionConfig builtin_config() {
  static const ExtractionConfig cached = make_builtin();
  return cached;
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::ConfigInvalid, "invalid config: " + what);
}

std::string lower(const std::string& s) {
  return unicode::to_utf8(unicode::to_lower(unicode::from_utf8(s)));
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

// The rule dialect is the portable subset: no backreferences, no lookaround.
void check_dialect(const Rule& rule) {
  const std::string& p = rule.pattern;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (p[i] == '\\') {
      if (p[i + 1] >= '1' && p[i + 1] <= '9') {
        invalid("rule '" + rule.id + "': backreferences are not supported");
      }
      ++i;
      continue;
    }
    if (p[i] == '(' && p[i + 1] == '?' && i + 2 < p.size() && p[i + 2] != ':') {
      invalid("rule '" + rule.id + "': lookaround groups are not supported");
    }
  }
}

int get_int(const nlohmann::json& doc, const char* field) {
  const auto& v = doc.at(field);
  if (!v.is_number_integer()) invalid(std::string(field) + " must be an integer");
  return v.get<int>();
}

}  // namespace

void validate(ExtractionConfig& config) {
  for (std::size_t i = 0; i < config.lexicon.size(); ++i) {
    auto& entry = config.lexicon[i];
    if (entry.phrase.empty() || blank(entry.phrase)) {
      invalid("lexicon[" + std::to_string(i) + "].phrase is empty");
    }
    if (entry.weight <= 0) {
      invalid("lexicon[" + std::to_string(i) + "].weight must be positive");
    }
    entry.phrase = lower(entry.phrase);
  }
  for (std::size_t i = 0; i < config.heading_lexicon.size(); ++i) {
    if (blank(config.heading_lexicon[i])) {
      invalid("heading_lexicon[" + std::to_string(i) + "] is empty");
    }
  }
  if (config.prefilter_threshold < 0) invalid("prefilter_threshold must be >= 0");
  if (config.accept_threshold <= 0) invalid("accept_threshold must be positive");
  if (!(config.confidence_k > 0)) invalid("confidence_k must be positive");
  if (config.max_statement_sentences <= 0) invalid("max_statement_sentences must be positive");

  std::set<std::string> ids;
  for (auto& rule : config.rules) {
    if (rule.id.empty()) invalid("rule id is empty");
    if (!ids.insert(rule.id).second) invalid("duplicate rule id '" + rule.id + "'");
    if (blank(rule.pattern)) invalid("rule '" + rule.id + "': pattern is empty");
    if (rule.score < 0) invalid("rule '" + rule.id + "': score must be >= 0");
    bool any_vote = false;
    for (const auto& [category, n] : rule.votes) {
      if (n < 0) invalid("rule '" + rule.id + "': votes must be >= 0");
      any_vote = any_vote || n > 0;
    }
    if (rule.score == 0 && !any_vote) {
      invalid("rule '" + rule.id + "': needs a positive score or votes");
    }
    check_dialect(rule);
    try {
      rule.regex = std::make_shared<const std::regex>(
          rule.pattern, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
    } catch (const std::regex_error& e) {
      invalid("rule '" + rule.id + "': pattern does not compile (" + e.what() + ")");
    }
  }
}

ExtractionConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) invalid("config must be a JSON object");
  static const std::set<std::string> kKnown = {
      "lexicon",          "heading_lexicon", "prefilter_threshold",    "rules",
      "accept_threshold", "confidence_k",    "max_statement_sentences"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKnown.count(key)) invalid("unknown field '" + key + "'");
  }

  ExtractionConfig config = builtin_config();
  try {
    if (doc.contains("lexicon")) {
      config.lexicon.clear();
      for (const auto& e : doc.at("lexicon")) {
        if (!e.is_object() || !e.contains("phrase") || !e.at("phrase").is_string()) {
          invalid("lexicon entries need a string 'phrase'");
        }
        LexiconEntry entry;
        entry.phrase = e.at("phrase").get<std::string>();
        entry.weight = get_int(e, "weight");
        config.lexicon.push_back(std::move(entry));
      }
    }
    if (doc.contains("heading_lexicon")) {
      config.heading_lexicon = doc.at("heading_lexicon").get<std::vector<std::string>>();
    }
    if (doc.contains("prefilter_threshold")) {
      config.prefilter_threshold = get_int(doc, "prefilter_threshold");
    }
    if (doc.contains("accept_threshold")) config.accept_threshold = get_int(doc, "accept_threshold");
    if (doc.contains("max_statement_sentences")) {
      config.max_statement_sentences = get_int(doc, "max_statement_sentences");
    }
    if (doc.contains("confidence_k")) {
      if (!doc.at("confidence_k").is_number()) invalid("confidence_k must be a number");
      config.confidence_k = doc.at("confidence_k").get<double>();
    }
    if (doc.contains("rules")) {
      config.rules.clear();
      for (const auto& r : doc.at("rules")) {
        Rule rule;
        if (!r.is_object() || !r.contains("id") || !r.at("id").is_string()) {
          invalid("rules need a string 'id'");
        }
        rule.id = r.at("id").get<std::string>();
        if (!r.contains("pattern") || !r.at("pattern").is_string()) {
          invalid("rule '" + rule.id + "': missing pattern");
        }
        rule.pattern = r.at("pattern").get<std::string>();
        rule.score = r.contains("score") ? get_int(r, "score") : 0;
        if (r.contains("votes")) {
          for (const auto& [name, n] : r.at("votes").items()) {
            auto category = parse_category(name);
            if (!category) invalid("rule '" + rule.id + "': unknown category '" + name + "'");
            if (!n.is_number_integer()) invalid("rule '" + rule.id + "': votes must be integers");
            rule.votes[*category] = n.get<int>();
          }
        }
        rule.requires_link = r.value("requires_link", false);
        rule.requires_availability_section = r.value("requires_availability_section", false);
        config.rules.push_back(std::move(rule));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    invalid(e.what());
  }
  validate(config);
  return config;
}

nlohmann::json config_to_json(const ExtractionConfig& config) {
  nlohmann::json doc;
  doc["lexicon"] = nlohmann::json::array();
  for (const auto& e : config.lexicon) {
    doc["lexicon"].push_back({{"phrase", e.phrase}, {"weight", e.weight}});
  }
  doc["heading_lexicon"] = config.heading_lexicon;
  doc["prefilter_threshold"] = config.prefilter_threshold;
  doc["accept_threshold"] = config.accept_threshold;
  doc["confidence_k"] = config.confidence_k;
  doc["max_statement_sentences"] = config.max_statement_sentences;
  doc["rules"] = nlohmann::json::array();
  for (const auto& r : config.rules) {
    nlohmann::json votes = nlohmann::json::object();
    for (const auto& [category, n] : r.votes) votes[std::string(to_string(category))] = n;
    doc["rules"].push_back({{"id", r.id},
                            {"pattern", r.pattern},
                            {"score", r.score},
                            {"votes", votes},
                            {"requires_link", r.requires_link},
                            {"requires_availability_section", r.requires_availability_section}});
  }
  return doc;
}

std::string ExtractionConfig::fingerprint() const { return sha256_hex(config_to_json(*this).dump()); }

ExtractionConfig load_config(const std::string& source) {
  if (source.empty() || source == "builtin") return builtin_config();
  std::ifstream in(source, std::ios::binary);
  if (!in) invalid("cannot read config file '" + source + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    invalid(std::string("not valid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

}  // namespace das
