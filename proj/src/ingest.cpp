#include "das/ingest.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <unordered_set>

#include "das/error.hpp"
#include "das/hash.hpp"
#include "das/links.hpp"
#include "das/unicode.hpp"

namespace das {

using unicode::is_space;

std::string_view to_string(SourceFormat format) {
  switch (format) {
    case SourceFormat::plain_text: return "plain_text";
    case SourceFormat::sectioned: return "sectioned";
    case SourceFormat::pdf: return "pdf";
  }
  return "plain_text";
}

SourceFormat parse_source_format(std::string_view name) {
  if (name == "plain" || name == "plain_text" || name == "text") return SourceFormat::plain_text;
  if (name == "sectioned") return SourceFormat::sectioned;
  if (name == "pdf") return SourceFormat::pdf;
  throw Error(ErrorCode::UnsupportedFormat, "unsupported input format: " + std::string(name));
}

std::string_view to_string(SectionKind kind) {
  return kind == SectionKind::availability_heading ? "availability_heading" : "other";
}

std::string Document::slice_utf8(Span span) const { return unicode::to_utf8(slice(span)); }

std::vector<std::string> default_heading_lexicon() {
  return {"data availability statement", "data availability",
          "availability of data and materials", "data access statement",
          "availability of data", "data and code availability", "data sharing"};
}

// ---------------------------------------------------------------------------
// normalization

namespace {

std::u32string_view ligature(char32_t c) {
  switch (c) {
    case U'ﬀ': return U"ff";
    case U'ﬁ': return U"fi";
    case U'ﬂ': return U"fl";
    case U'ﬃ': return U"ffi";
    case U'ﬄ': return U"ffl";
    case U'ﬅ':
    case U'ﬆ': return U"st";
    default: return {};
  }
}

std::u32string normalize_pass(std::u32string_view raw) {
  std::u32string text = unicode::nfc(raw);

  std::u32string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    char32_t c = text[i];
    if (c == U'­') continue;
    if (c == U'\r') {
      if (i + 1 < text.size() && text[i + 1] == U'\n') ++i;
      c = U'\n';
    }
    if (auto lig = ligature(c); !lig.empty()) {
      out.append(lig);
      continue;
    }
    if (c == U' ' || c == U'\t') {
      if (!out.empty() && out.back() == U' ') continue;
      out.push_back(U' ');
      continue;
    }
    out.push_back(c);
  }

  // "avail-\nable" -> "available"; only lowercase continuations are joined.
  std::u32string joined;
  joined.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == U'-' && i + 2 < out.size() && out[i + 1] == U'\n' &&
        unicode::is_lower(out[i + 2])) {
      ++i;
      continue;
    }
    joined.push_back(out[i]);
  }
  return joined;
}

}  // namespace

std::u32string normalize_text(std::u32string_view raw) {
  // Each rewrite only shrinks the text, so iterating to a fixpoint
  // terminates and makes the function idempotent.
  std::u32string current = normalize_pass(raw);
  for (;;) {
    std::u32string next = normalize_pass(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

std::string normalize_text(std::string_view raw) {
  return unicode::to_utf8(normalize_text(unicode::from_utf8(raw)));
}

// ---------------------------------------------------------------------------
// sections

namespace {

std::u32string collapse_lower(std::u32string_view text) {
  std::u32string out;
  for (char32_t c : unicode::trim(text)) {
    if (is_space(c)) {
      if (!out.empty() && out.back() != U' ') out.push_back(U' ');
    } else {
      out.push_back(unicode::to_lower(c));
    }
  }
  return out;
}

std::u32string_view strip_section_number(std::u32string_view line) {
  std::size_t i = 0;
  bool digits = false;
  while (i < line.size() && (unicode::is_digit(line[i]) || line[i] == U'.')) {
    digits = digits || unicode::is_digit(line[i]);
    ++i;
  }
  if (!digits || i == 0) return line;
  if (i < line.size() && !is_space(line[i])) return line;
  return unicode::trim(line.substr(i));
}

bool matches_lexicon(std::u32string_view heading, const std::vector<std::string>& lexicon) {
  std::u32string_view h = strip_section_number(unicode::trim(heading));
  while (!h.empty() && (h.back() == U':' || is_space(h.back()))) h.remove_suffix(1);
  std::u32string key = collapse_lower(h);
  if (key.empty()) return false;
  return std::any_of(lexicon.begin(), lexicon.end(), [&](const std::string& entry) {
    return collapse_lower(unicode::from_utf8(entry)) == key;
  });
}

bool is_minor_word(std::u32string_view word) {
  static const std::unordered_set<std::u32string> kMinor = {
      U"a", U"an", U"and", U"as", U"at", U"by", U"for", U"from", U"in", U"into",
      U"of", U"on", U"or", U"the", U"to", U"under", U"via", U"with", U"vs"};
  std::u32string w;
  for (char32_t c : word) {
    if (unicode::is_alpha(c)) w.push_back(unicode::to_lower(c));
  }
  return kMinor.count(w) > 0;
}

bool is_title_case(std::u32string_view line) {
  bool first_word = true;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t end = i;
    while (end < line.size() && !is_space(line[end])) ++end;
    if (end == i) break;
    auto word = line.substr(i, end - i);
    auto letter = std::find_if(word.begin(), word.end(), unicode::is_alpha);
    if (letter != word.end()) {
      if (!unicode::is_upper(*letter) && (first_word || !is_minor_word(word))) return false;
      first_word = false;
    }
    i = end;
  }
  return !first_word;
}

bool is_all_caps(std::u32string_view line) {
  std::size_t letters = 0;
  for (char32_t c : line) {
    if (!unicode::is_alpha(c)) continue;
    if (unicode::is_lower(c)) return false;
    ++letters;
  }
  return letters >= 2;
}

bool is_heading_line(std::u32string_view line, const std::vector<std::string>& lexicon) {
  line = unicode::trim(line);
  if (line.empty() || line.size() > 80) return false;
  char32_t last = line.back();
  if (last == U'.' || last == U'!' || last == U'?') return false;
  if (std::none_of(line.begin(), line.end(), unicode::is_alpha)) return false;
  return is_all_caps(line) || is_title_case(line) || matches_lexicon(line, lexicon);
}

}  // namespace

bool is_availability_heading(std::string_view heading, const std::vector<std::string>& lexicon) {
  return matches_lexicon(unicode::from_utf8(heading), lexicon);
}

std::vector<Section> detect_sections(std::u32string_view text,
                                     const std::vector<std::string>& heading_lexicon) {
  std::vector<Section> sections;
  std::size_t line_start = 0;
  while (line_start < text.size()) {
    std::size_t line_end = text.find(U'\n', line_start);
    if (line_end == std::u32string_view::npos) line_end = text.size();
    auto line = text.substr(line_start, line_end - line_start);
    if (is_heading_line(line, heading_lexicon)) {
      if (sections.empty() && line_start > 0) {
        sections.push_back({std::nullopt, SectionKind::other, {0, line_start}, 0});
      }
      if (!sections.empty()) sections.back().span.end = line_start;
      Section section;
      auto heading = unicode::trim(line);
      section.heading = unicode::to_utf8(heading);
      section.kind = matches_lexicon(heading, heading_lexicon) ? SectionKind::availability_heading
                                                               : SectionKind::other;
      section.span = {line_start, text.size()};
      section.body_start = std::min(line_end + 1, text.size());
      sections.push_back(std::move(section));
    }
    line_start = line_end + 1;
  }
  if (sections.empty()) {
    sections.push_back({std::nullopt, SectionKind::other, {0, text.size()}, 0});
  }
  return sections;
}

// ---------------------------------------------------------------------------
// sentences

namespace {

bool is_abbreviation(std::u32string_view text, std::size_t begin, std::size_t dot) {
  static const std::unordered_set<std::u32string> kAbbreviations = {
      U"al.",   U"e.g.", U"i.e.", U"fig.",  U"figs.", U"no.",  U"nos.", U"vs.",
      U"cf.",   U"eq.",  U"eqs.", U"ref.",  U"refs.", U"dr.",  U"prof.", U"approx.",
      U"ca.",   U"vol.", U"pp.",  U"resp.", U"suppl.", U"tab.", U"sect.", U"inc.",
      U"ltd.",  U"co.",  U"mr.",  U"ms.",   U"st.",   U"viz.", U"etc.", U"ed.", U"eds."};
  std::size_t start = dot;
  while (start > begin && !is_space(text[start - 1])) --start;
  std::u32string token;
  for (std::size_t i = start; i <= dot; ++i) token.push_back(unicode::to_lower(text[i]));
  while (!token.empty() && (token.front() == U'(' || token.front() == U'[' ||
                            token.front() == U'"' || token.front() == U'\'')) {
    token.erase(token.begin());
  }
  return kAbbreviations.count(token) > 0;
}

void push_sentence(std::u32string_view text, std::size_t begin, std::size_t end,
                   std::size_t section_index, std::vector<Sentence>& out) {
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  if (end > begin) out.push_back({{begin, end}, section_index});
}

void split_paragraph(std::u32string_view text, std::size_t begin, std::size_t end,
                     std::size_t section_index, std::vector<Sentence>& out) {
  auto tokens = find_link_tokens(text.substr(begin, end - begin));
  auto in_link = [&](std::size_t pos) {
    std::size_t rel = pos - begin;
    return std::any_of(tokens.begin(), tokens.end(),
                       [rel](const Span& s) { return s.start <= rel && rel + 1 < s.end; });
  };

  std::size_t start = begin;
  for (std::size_t i = begin; i < end; ++i) {
    char32_t c = text[i];
    if (c != U'.' && c != U'!' && c != U'?') continue;
    std::size_t next = i + 1;
    if (next >= end || !is_space(text[next])) continue;
    while (next < end && is_space(text[next])) ++next;
    if (next >= end) continue;
    if (!unicode::is_upper(text[next]) && !unicode::is_digit(text[next])) continue;
    if (c == U'.' && is_abbreviation(text, start, i)) continue;
    if (in_link(i)) continue;
    push_sentence(text, start, i + 1, section_index, out);
    start = next;
    i = next - 1;
  }
  push_sentence(text, start, end, section_index, out);
}

}  // namespace

std::vector<Sentence> segment_sentences(const Document& document) {
  std::u32string_view text = document.text;
  std::vector<Sentence> out;
  for (std::size_t s = 0; s < document.sections.size(); ++s) {
    const Section& section = document.sections[s];
    std::size_t begin = std::max(section.body_start, section.span.start);
    std::size_t end = section.span.end;
    // Blank lines separate paragraphs; no sentence spans a paragraph break.
    std::size_t para_start = begin;
    std::size_t i = begin;
    while (i < end) {
      if (text[i] == U'\n') {
        std::size_t j = i + 1;
        while (j < end && (text[j] == U' ' || text[j] == U'\t')) ++j;
        if (j < end && text[j] == U'\n') {
          split_paragraph(text, para_start, i, s, out);
          para_start = j;
          i = j;
          continue;
        }
      }
      ++i;
    }
    if (para_start < end) split_paragraph(text, para_start, end, s, out);
  }
  return out;
}

// ---------------------------------------------------------------------------
// loading

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

struct TempFile {
  std::string path;
  TempFile() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "das-pdf-XXXXXX").string();
    int fd = mkstemp(tmpl.data());
    if (fd < 0) throw Error(ErrorCode::ConverterFailure, "cannot create temporary file");
    close(fd);
    path = tmpl;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
};

Document finish(std::string id, SourceFormat format, std::size_t raw_len, std::u32string text,
                std::vector<Section> sections, DocumentMetadata metadata) {
  if (unicode::trim(text).empty()) {
    throw Error(ErrorCode::EmptyDocument, "document has no text after normalization");
  }
  Document doc;
  doc.id = std::move(id);
  doc.source_format = format;
  doc.raw_len = raw_len;
  doc.text = std::move(text);
  doc.sections = std::move(sections);
  doc.metadata = std::move(metadata);
  doc.sentences = segment_sentences(doc);
  return doc;
}

Document load_plain(const InputDescriptor& source, SourceFormat format, std::string_view text,
                    const IngestOptions& options) {
  std::u32string normalized = normalize_text(unicode::from_utf8(text));
  auto sections = detect_sections(normalized, options.heading_lexicon);
  return finish(sha256_hex(source.content), format, source.content.size(), std::move(normalized),
                std::move(sections), source.metadata);
}

std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::MalformedInput, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

Document load_sectioned(const InputDescriptor& source, const IngestOptions& options) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(source.content);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedInput, std::string("sectioned input is not JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("sections") || !root["sections"].is_array()) {
    throw Error(ErrorCode::MalformedInput, "sectioned input needs a 'sections' array");
  }

  DocumentMetadata metadata = source.metadata;
  if (auto it = root.find("metadata"); it != root.end() && it->is_object()) {
    if (!metadata.title) metadata.title = optional_string(*it, "title");
    if (!metadata.origin) metadata.origin = optional_string(*it, "origin");
  }

  std::u32string text;
  std::vector<Section> sections;
  for (const auto& record : root["sections"]) {
    if (!record.is_object()) throw Error(ErrorCode::MalformedInput, "section must be an object");
    auto heading = optional_string(record, "heading");
    auto body = optional_string(record, "body").value_or("");
    std::u32string heading_text =
        heading ? std::u32string(unicode::trim(normalize_text(unicode::from_utf8(*heading))))
                : std::u32string();
    std::u32string body_text(unicode::trim(normalize_text(unicode::from_utf8(body))));
    if (heading_text.empty() && body_text.empty()) continue;

    if (!sections.empty()) {
      text += U"\n\n";
      sections.back().span.end = text.size();
    }
    Section section;
    section.span.start = text.size();
    if (!heading_text.empty()) {
      section.heading = unicode::to_utf8(heading_text);
      section.kind = matches_lexicon(heading_text, options.heading_lexicon)
                         ? SectionKind::availability_heading
                         : SectionKind::other;
      text += heading_text;
      text += U'\n';
    }
    section.body_start = text.size();
    text += body_text;
    section.span.end = text.size();
    sections.push_back(std::move(section));
  }
  if (sections.empty()) throw Error(ErrorCode::EmptyDocument, "sectioned input has no content");
  return finish(sha256_hex(source.content), SourceFormat::sectioned, source.content.size(),
                std::move(text), std::move(sections), std::move(metadata));
}

}  // namespace

std::string run_pdf_converter(const std::string& command_template, std::string_view pdf) {
  if (command_template.empty()) {
    throw Error(ErrorCode::ConverterFailure, "no PDF converter configured");
  }
  TempFile input;
  {
    std::ofstream out(input.path, std::ios::binary);
    out.write(pdf.data(), static_cast<std::streamsize>(pdf.size()));
    if (!out) throw Error(ErrorCode::ConverterFailure, "cannot write temporary PDF");
  }
  std::string command = command_template;
  const std::string placeholder = "{input}";
  std::string quoted = shell_quote(input.path);
  if (auto pos = command.find(placeholder); pos != std::string::npos) {
    while (pos != std::string::npos) {
      command.replace(pos, placeholder.size(), quoted);
      pos = command.find(placeholder, pos + quoted.size());
    }
  } else {
    command += " " + quoted;
  }

  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) throw Error(ErrorCode::ConverterFailure, "cannot start converter");
  std::string output;
  std::array<char, 8192> buffer{};
  std::size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) output.append(buffer.data(), n);
  int status = pclose(pipe);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::ConverterFailure,
                "converter exited with status " +
                    std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : status));
  }
  if (std::all_of(output.begin(), output.end(),
                  [](unsigned char c) { return std::isspace(c) != 0; })) {
    throw Error(ErrorCode::ConverterFailure, "converter produced no text");
  }
  return output;
}

Document load_document(const InputDescriptor& source, const IngestOptions& options) {
  switch (source.format) {
    case SourceFormat::plain_text:
      return load_plain(source, SourceFormat::plain_text, source.content, options);
    case SourceFormat::sectioned:
      return load_sectioned(source, options);
    case SourceFormat::pdf: {
      std::string text = run_pdf_converter(options.converter_command, source.content);
      return load_plain(source, SourceFormat::pdf, text, options);
    }
  }
  throw Error(ErrorCode::UnsupportedFormat, "unsupported input format");
}

}  // namespace das
