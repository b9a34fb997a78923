#include "das/eval.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "das/batch.hpp"
#include "das/error.hpp"

namespace das {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void corpus_invalid(const std::string& message) {
  throw Error(ErrorCode::CorpusInvalid, message);
}

constexpr std::string_view kGoldSuffix = ".gold.json";

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string label(Category c) { return std::string(to_string(c)); }

}  // namespace

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::tp: return "tp";
    case Outcome::fp: return "fp";
    case Outcome::fn: return "fn";
    case Outcome::tn: return "tn";
    case Outcome::wrong: return "wrong";
  }
  return "tn";
}

std::vector<GoldSpan> parse_gold(const json& doc) {
  if (!doc.is_object() || !doc.contains("spans") || !doc["spans"].is_array()) {
    corpus_invalid("gold label needs a 'spans' array");
  }
  std::vector<GoldSpan> out;
  for (const auto& item : doc["spans"]) {
    if (!item.is_object()) corpus_invalid("gold span must be an object");
    GoldSpan g;
    try {
      g.span.start = item.at("start").get<std::size_t>();
      g.span.end = item.at("end").get<std::size_t>();
      g.links = item.value("links", std::vector<std::string>{});
    } catch (const json::exception& e) {
      corpus_invalid(std::string("bad gold span: ") + e.what());
    }
    if (g.span.end <= g.span.start) corpus_invalid("gold span is empty");
    auto category = item.contains("category") && item["category"].is_string()
                        ? parse_category(item["category"].get<std::string>())
                        : std::nullopt;
    if (!category) corpus_invalid("gold span has no valid category");
    g.category = *category;
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.span < b.span; });
  return out;
}

DocumentScore score_document(const std::string& name, const std::vector<GoldSpan>& gold,
                             const std::vector<DataAccessStatement>& statements) {
  DocumentScore score;
  score.name = name;
  for (const auto& g : gold) score.gold_categories.insert(g.category);
  for (const auto& s : statements) score.predicted_categories.insert(s.category);
  for (const auto& g : gold) {
    for (const auto& s : statements) {
      if (g.category == s.category && g.span.overlaps(s.span)) {
        score.matched_categories.insert(g.category);
      }
    }
  }

  score.gold_label = gold.empty() ? "none" : label(gold.front().category);
  score.predicted_label = "none";
  if (!statements.empty()) {
    score.predicted_label = label(statements.front().category);
    if (!gold.empty()) {
      for (const auto& s : statements) {
        if (s.span.overlaps(gold.front().span)) {
          score.predicted_label = label(s.category);
          break;
        }
      }
    }
  }

  if (gold.empty()) {
    score.outcome = statements.empty() ? Outcome::tn : Outcome::fp;
  } else if (!score.matched_categories.empty()) {
    score.outcome = Outcome::tp;
  } else {
    score.outcome = statements.empty() ? Outcome::fn : Outcome::wrong;
  }
  return score;
}

Metrics make_metrics(int tp, int fp, int fn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
  m.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn);
  double sum = m.precision + m.recall;
  m.f1 = sum == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / sum;
  return m;
}

EvalReport summarize(std::vector<DocumentScore> documents, std::string config_fingerprint) {
  EvalReport report;
  report.corpus_size = documents.size();
  report.config_fingerprint = std::move(config_fingerprint);
  for (Outcome o : {Outcome::tp, Outcome::fp, Outcome::fn, Outcome::tn, Outcome::wrong}) {
    report.counts[o] = 0;
  }
  std::map<Category, std::array<int, 3>> per;  // tp, fp, fn
  for (Category c : kAllCategories) per[c] = {0, 0, 0};
  for (const auto& d : documents) {
    ++report.counts[d.outcome];
    ++report.confusion[d.gold_label][d.predicted_label];
    for (Category c : kAllCategories) {
      bool matched = d.matched_categories.count(c) > 0;
      if (matched) ++per[c][0];
      if (!matched && d.predicted_categories.count(c)) ++per[c][1];
      if (!matched && d.gold_categories.count(c)) ++per[c][2];
    }
  }
  int wrong = report.counts[Outcome::wrong];
  report.overall = make_metrics(report.counts[Outcome::tp], report.counts[Outcome::fp] + wrong,
                                report.counts[Outcome::fn] + wrong);
  for (const auto& [c, v] : per) report.per_category[c] = make_metrics(v[0], v[1], v[2]);
  report.documents = std::move(documents);
  return report;
}

EvalReport evaluate_corpus(const fs::path& dir, const ExtractionConfig& config,
                           const IngestOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) corpus_invalid(dir.string() + " is not a directory");

  std::vector<fs::path> texts;
  std::vector<fs::path> golds;
  for (auto it = fs::recursive_directory_iterator(dir, ec);
       !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (!it->is_regular_file(ec)) continue;
    std::string name = it->path().filename().string();
    if (ends_with(name, kGoldSuffix)) {
      golds.push_back(it->path());
    } else if (it->path().extension() == ".txt") {
      texts.push_back(it->path());
    }
  }
  if (ec) corpus_invalid("cannot walk " + dir.string() + ": " + ec.message());
  if (texts.empty()) corpus_invalid(dir.string() + " holds no documents");
  std::sort(texts.begin(), texts.end());

  auto gold_path_for = [](const fs::path& text) {
    fs::path p = text;
    p.replace_extension();
    return fs::path(p.string() + std::string(kGoldSuffix));
  };
  for (const auto& gold : golds) {
    std::string s = gold.string();
    fs::path text(s.substr(0, s.size() - kGoldSuffix.size()) + ".txt");
    if (!fs::exists(text, ec)) corpus_invalid("label " + s + " has no document");
  }

  std::vector<DocumentScore> scores;
  for (const auto& text : texts) {
    fs::path gold_path = gold_path_for(text);
    if (!fs::exists(gold_path, ec)) corpus_invalid("missing label file " + gold_path.string());
    std::vector<GoldSpan> gold;
    std::string content;
    try {
      gold = parse_gold(json::parse(read_file(gold_path)));
      content = read_file(text);
    } catch (const json::exception& e) {
      corpus_invalid(gold_path.string() + ": " + e.what());
    } catch (const Error& e) {
      corpus_invalid(gold_path.string() + ": " + e.what());
    } catch (const std::exception& e) {
      corpus_invalid(e.what());
    }

    InputDescriptor input;
    input.content = std::move(content);
    Document document;
    try {
      document = load_document(input, options);
    } catch (const Error& e) {
      corpus_invalid(text.string() + ": " + e.what());
    }
    for (const auto& g : gold) {
      if (g.span.end > document.text.size()) {
        corpus_invalid(gold_path.string() + ": span beyond document end");
      }
    }
    auto result = extract(document, config);
    std::string name = fs::relative(text, dir).replace_extension().generic_string();
    scores.push_back(score_document(name, gold, result.statements));
  }
  return summarize(std::move(scores), config.fingerprint());
}

json to_json(const EvalReport& report) {
  auto metrics = [](const Metrics& m) {
    return json{{"tp", m.tp},
                {"fp", m.fp},
                {"fn", m.fn},
                {"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1}};
  };
  json counts = json::object();
  for (const auto& [o, n] : report.counts) counts[std::string(to_string(o))] = n;
  json per = json::object();
  for (const auto& [c, m] : report.per_category) per[label(c)] = metrics(m);
  json documents = json::array();
  for (const auto& d : report.documents) {
    documents.push_back({{"name", d.name},
                         {"outcome", to_string(d.outcome)},
                         {"gold", d.gold_label},
                         {"predicted", d.predicted_label}});
  }
  return json{{"corpus_size", report.corpus_size},
              {"counts", counts},
              {"overall", metrics(report.overall)},
              {"per_category", per},
              {"confusion", report.confusion},
              {"config_fingerprint", report.config_fingerprint},
              {"documents", documents}};
}

std::string format_report(const EvalReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "corpus size        %zu\n", report.corpus_size);
  out += line;
  out += "config fingerprint " + report.config_fingerprint + "\n";
  out += "outcomes          ";
  for (const auto& [o, n] : report.counts) {
    out += " " + std::string(to_string(o)) + "=" + std::to_string(n);
  }
  out += "\n";
  std::snprintf(line, sizeof line, "overall            precision %.4f  recall %.4f  f1 %.4f\n",
                report.overall.precision, report.overall.recall, report.overall.f1);
  out += line;
  out += "\nper category\n";
  for (const auto& [c, m] : report.per_category) {
    std::snprintf(line, sizeof line, "  %-24s tp %3d fp %3d fn %3d  p %.4f r %.4f f1 %.4f\n",
                  label(c).c_str(), m.tp, m.fp, m.fn, m.precision, m.recall, m.f1);
    out += line;
  }
  out += "\nconfusion (gold -> predicted)\n";
  for (const auto& [gold, row] : report.confusion) {
    for (const auto& [predicted, n] : row) {
      std::snprintf(line, sizeof line, "  %-24s -> %-24s %d\n", gold.c_str(), predicted.c_str(), n);
      out += line;
    }
  }
  bool header = false;
  for (const auto& d : report.documents) {
    if (d.outcome == Outcome::tp || d.outcome == Outcome::tn) continue;
    if (!header) out += "\nmisses\n";
    header = true;
    out += "  " + d.name + " " + std::string(to_string(d.outcome)) + " gold=" + d.gold_label +
           " predicted=" + d.predicted_label + "\n";
  }
  return out;
}

}  // namespace das
