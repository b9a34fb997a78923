#include "das/extraction.hpp"

#include <algorithm>
#include <array>

#include "das/hash.hpp"
#include "das/unicode.hpp"

namespace das {

namespace {

bool match_at(std::u32string_view text, std::size_t pos, std::size_t end,
              std::u32string_view phrase, std::size_t& match_end) {
  std::size_t j = pos;
  for (std::size_t i = 0; i < phrase.size(); ++i) {
    if (phrase[i] == U' ') {
      if (j >= end || !unicode::is_space(text[j])) return false;
      while (j < end && unicode::is_space(text[j])) ++j;
      continue;
    }
    if (j >= end || text[j] != phrase[i]) return false;
    ++j;
  }
  match_end = j;
  return true;
}

struct LoweredLexicon {
  std::vector<std::u32string> phrases;
  explicit LoweredLexicon(const ExtractionConfig& config) {
    phrases.reserve(config.lexicon.size());
    for (const auto& entry : config.lexicon) {
      phrases.push_back(unicode::to_lower(unicode::from_utf8(entry.phrase)));
    }
  }
};

bool rule_fires(const Rule& rule, const std::string& text, bool has_link, bool in_section) {
  if (rule.requires_link && !has_link) return false;
  if (rule.requires_availability_section && !in_section) return false;
  return rule.regex && std::regex_search(text, *rule.regex);
}

bool starts_with_connective(std::u32string_view sentence) {
  static const std::array<std::u32string_view, 5> kConnectives = {U"these", U"this", U"further",
                                                                  U"additional", U"they"};
  std::size_t end = 0;
  while (end < sentence.size() && unicode::is_alpha(sentence[end])) ++end;
  std::u32string first = unicode::to_lower(sentence.substr(0, end));
  return std::find(kConnectives.begin(), kConnectives.end(), first) != kConnectives.end();
}

}  // namespace

int count_phrase(std::u32string_view lowered, std::size_t begin, std::size_t end,
                 std::u32string_view phrase) {
  if (phrase.empty()) return 0;
  int count = 0;
  std::size_t pos = begin;
  while (pos < end) {
    std::size_t match_end = 0;
    bool boundary_before = pos == 0 || !unicode::is_word(lowered[pos - 1]) ||
                           !unicode::is_word(phrase.front());
    if (boundary_before && match_at(lowered, pos, end, phrase, match_end)) {
      bool boundary_after = match_end >= lowered.size() || !unicode::is_word(lowered[match_end]) ||
                            !unicode::is_word(phrase.back());
      if (boundary_after) {
        ++count;
        pos = match_end;
        continue;
      }
    }
    ++pos;
  }
  return count;
}

PrefilterResult prefilter_score(const Document& document, const ExtractionConfig& config) {
  PrefilterResult result;
  result.document_id = document.id;
  std::u32string lowered = unicode::to_lower(document.text);
  LoweredLexicon lexicon(config);
  for (std::size_t i = 0; i < config.lexicon.size(); ++i) {
    int count = count_phrase(lowered, 0, lowered.size(), lexicon.phrases[i]);
    if (count == 0) continue;
    int weight = config.lexicon[i].weight;
    result.matched.push_back({config.lexicon[i].phrase, count, weight});
    result.score += count * weight;
  }
  return result;
}

std::vector<CandidateSpan> find_candidates(const Document& document,
                                           const ExtractionConfig& config) {
  const auto& sentences = document.sentences;
  const std::size_t n = sentences.size();
  std::u32string lowered = unicode::to_lower(document.text);
  LoweredLexicon lexicon(config);

  struct SentenceInfo {
    std::vector<std::string> phrases;  // weight >= 3 lexicon hits
    bool in_section = false;
    bool continues = false;  // link, rule or connective
  };
  std::vector<SentenceInfo> info(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Sentence& s = sentences[i];
    const Section& section = document.sections[s.section_index];
    auto& si = info[i];
    si.in_section = section.kind == SectionKind::availability_heading;
    for (std::size_t p = 0; p < config.lexicon.size(); ++p) {
      if (config.lexicon[p].weight < 3) continue;
      if (count_phrase(lowered, s.span.start, s.span.end, lexicon.phrases[p]) > 0) {
        si.phrases.push_back(config.lexicon[p].phrase);
      }
    }
    auto slice = document.slice(s.span);
    bool has_link = !extract_links(slice, s.span.start).empty();
    std::string text = unicode::to_utf8(slice);
    bool fires = std::any_of(config.rules.begin(), config.rules.end(), [&](const Rule& rule) {
      return rule_fires(rule, text, has_link, si.in_section);
    });
    si.continues = has_link || fires || starts_with_connective(slice);
  }

  const std::size_t cap = static_cast<std::size_t>(config.max_statement_sentences);
  std::vector<CandidateSpan> candidates;
  std::size_t i = 0;
  while (i < n) {
    if (info[i].phrases.empty() && !info[i].in_section) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && j + 2 - i <= cap &&
           sentences[j + 1].section_index == sentences[i].section_index && info[j + 1].continues) {
      ++j;
    }
    CandidateSpan candidate;
    candidate.span = {sentences[i].span.start, sentences[j].span.end};
    candidate.section_index = sentences[i].section_index;
    candidate.in_availability_section = info[i].in_section;
    candidate.first_sentence = i;
    candidate.sentence_count = j - i + 1;
    for (std::size_t k = i; k <= j; ++k) {
      for (const auto& phrase : info[k].phrases) {
        if (std::find(candidate.trigger_phrases.begin(), candidate.trigger_phrases.end(), phrase) ==
            candidate.trigger_phrases.end()) {
          candidate.trigger_phrases.push_back(phrase);
        }
      }
    }
    if (candidate.trigger_phrases.empty()) {
      const auto& heading = document.sections[candidate.section_index].heading;
      candidate.trigger_phrases.push_back("heading:" + heading.value_or(""));
    }
    candidates.push_back(std::move(candidate));
    i = j + 1;
  }
  return candidates;
}

namespace {

RuleMatchReport run_rules(const std::string& text, bool has_link, bool in_section,
                          const ExtractionConfig& config) {
  RuleMatchReport report;
  for (const auto& rule : config.rules) {
    if (!rule_fires(rule, text, has_link, in_section)) continue;
    report.matched_rule_ids.push_back(rule.id);
    report.total_score += rule.score;
    for (const auto& [category, votes] : rule.votes) report.vote_tally[category] += votes;
  }
  return report;
}

}  // namespace

RuleMatchReport apply_rules(const CandidateSpan& candidate, const Document& document,
                            const ExtractionConfig& config) {
  auto slice = document.slice(candidate.span);
  bool has_link = !extract_links(slice, candidate.span.start).empty();
  return run_rules(unicode::to_utf8(slice), has_link, candidate.in_availability_section, config);
}

double score_to_confidence(int score, const ExtractionConfig& config) {
  if (score <= 0) return 0.0;
  double s = static_cast<double>(score);
  return s / (s + config.confidence_k);
}

Category classify(const VoteTally& tally) {
  static constexpr std::array<Category, 5> kPrecedence = {
      Category::not_available, Category::on_request, Category::restricted_conditional,
      Category::repository_deposited, Category::in_paper_or_supplement};
  Category best = Category::unspecified_present;
  int best_votes = 0;
  for (Category c : kPrecedence) {
    auto it = tally.find(c);
    if (it != tally.end() && it->second > best_votes) {
      best = c;
      best_votes = it->second;
    }
  }
  return best;
}

std::string statement_id(const std::string& document_id, Span span) {
  return sha256_hex(document_id + ":" + std::to_string(span.start) + ":" +
                    std::to_string(span.end));
}

ExtractionResult extract(const Document& document, const ExtractionConfig& config) {
  ExtractionResult result;
  result.document_id = document.id;
  result.config_fingerprint = config.fingerprint();
  result.prefilter = prefilter_score(document, config);
  result.passed_prefilter = result.prefilter.score >= config.prefilter_threshold;
  if (!result.passed_prefilter) return result;

  for (const auto& candidate : find_candidates(document, config)) {
    auto slice = document.slice(candidate.span);
    auto links = extract_links(slice, candidate.span.start);
    std::string text = unicode::to_utf8(slice);
    auto report = run_rules(text, !links.empty(), candidate.in_availability_section, config);
    if (report.total_score < config.accept_threshold) continue;

    DataAccessStatement statement;
    statement.id = statement_id(document.id, candidate.span);
    statement.document_id = document.id;
    statement.span = candidate.span;
    statement.text = std::move(text);
    statement.category = classify(report.vote_tally);
    statement.links = std::move(links);
    statement.score = report.total_score;
    statement.confidence = score_to_confidence(report.total_score, config);
    statement.matched_rules = std::move(report.matched_rule_ids);
    result.statements.push_back(std::move(statement));
  }
  std::sort(result.statements.begin(), result.statements.end(),
            [](const auto& a, const auto& b) { return a.span < b.span; });
  return result;
}

}  // namespace das
