#include "das/json.hpp"

#include "das/error.hpp"
#include "das/unicode.hpp"

namespace das {

using nlohmann::json;

void to_json(json& j, const Span& span) { j = json{{"start", span.start}, {"end", span.end}}; }

void from_json(const json& j, Span& span) {
  span.start = j.at("start").get<std::size_t>();
  span.end = j.at("end").get<std::size_t>();
}

void to_json(json& j, const ResourceLink& link) {
  j = json{{"kind", to_string(link.kind)},
           {"raw", link.raw},
           {"canonical", link.canonical},
           {"span", link.span}};
}

void from_json(const json& j, ResourceLink& link) {
  auto kind = j.at("kind").get<std::string>();
  link.kind = kind == "doi" ? LinkKind::doi : kind == "accession" ? LinkKind::accession : LinkKind::url;
  link.raw = j.at("raw").get<std::string>();
  link.canonical = j.at("canonical").get<std::string>();
  link.span = j.at("span").get<Span>();
}

void to_json(json& j, const PrefilterResult& result) {
  json matched = json::array();
  for (const auto& m : result.matched) {
    matched.push_back({{"phrase", m.phrase}, {"count", m.count}, {"weight", m.weight}});
  }
  j = json{{"document_id", result.document_id}, {"score", result.score}, {"matched", matched}};
}

void from_json(const json& j, PrefilterResult& result) {
  result.document_id = j.at("document_id").get<std::string>();
  result.score = j.at("score").get<int>();
  result.matched.clear();
  for (const auto& m : j.at("matched")) {
    result.matched.push_back(
        {m.at("phrase").get<std::string>(), m.at("count").get<int>(), m.at("weight").get<int>()});
  }
}

void to_json(json& j, const DataAccessStatement& s) {
  j = json{{"id", s.id},
           {"document_id", s.document_id},
           {"span", s.span},
           {"text", s.text},
           {"category", to_string(s.category)},
           {"links", s.links},
           {"score", s.score},
           {"confidence", s.confidence},
           {"matched_rules", s.matched_rules}};
}

void from_json(const json& j, DataAccessStatement& s) {
  s.id = j.at("id").get<std::string>();
  s.document_id = j.at("document_id").get<std::string>();
  s.span = j.at("span").get<Span>();
  s.text = j.at("text").get<std::string>();
  auto category = parse_category(j.at("category").get<std::string>());
  if (!category) throw Error(ErrorCode::MalformedInput, "unknown category in statement");
  s.category = *category;
  s.links = j.at("links").get<std::vector<ResourceLink>>();
  s.score = j.at("score").get<int>();
  s.confidence = j.at("confidence").get<double>();
  s.matched_rules = j.value("matched_rules", std::vector<std::string>{});
}

void to_json(json& j, const ExtractionResult& r) {
  j = json{{"document_id", r.document_id},
           {"prefilter", r.prefilter},
           {"passed_prefilter", r.passed_prefilter},
           {"statements", r.statements},
           {"config_fingerprint", r.config_fingerprint}};
}

void from_json(const json& j, ExtractionResult& r) {
  r.document_id = j.at("document_id").get<std::string>();
  r.prefilter = j.at("prefilter").get<PrefilterResult>();
  r.passed_prefilter = j.at("passed_prefilter").get<bool>();
  r.statements = j.at("statements").get<std::vector<DataAccessStatement>>();
  r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
}

void to_json(json& j, const Document& d) {
  json sections = json::array();
  for (const auto& s : d.sections) {
    sections.push_back({{"heading", s.heading ? json(*s.heading) : json(nullptr)},
                        {"kind", to_string(s.kind)},
                        {"span", s.span}});
  }
  json sentences = json::array();
  for (const auto& s : d.sentences) {
    sentences.push_back({{"span", s.span}, {"section_index", s.section_index}});
  }
  j = json{{"id", d.id},
           {"source_format", to_string(d.source_format)},
           {"raw_len", d.raw_len},
           {"text", unicode::to_utf8(d.text)},
           {"sections", sections},
           {"sentences", sentences},
           {"metadata",
            {{"title", d.metadata.title ? json(*d.metadata.title) : json(nullptr)},
             {"origin", d.metadata.origin ? json(*d.metadata.origin) : json(nullptr)}}}};
}

}  // namespace das
