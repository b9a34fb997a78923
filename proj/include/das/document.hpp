#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace das {

// Half-open range of Unicode scalar value offsets.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool empty() const { return end <= start; }
  bool contains(const Span& other) const {
    return start <= other.start && other.end <= end;
  }
  bool overlaps(const Span& other) const {
    return start < other.end && other.start < end;
  }

  auto operator<=>(const Span&) const = default;
};

enum class SourceFormat { plain_text, sectioned, pdf };

std::string_view to_string(SourceFormat format);

// Accepts "plain", "plain_text", "text", "sectioned", "pdf".
// Throws Error(UnsupportedFormat) for anything else.
SourceFormat parse_source_format(std::string_view name);

enum class SectionKind { availability_heading, other };

std::string_view to_string(SectionKind kind);

struct Section {
  std::optional<std::string> heading;
  SectionKind kind = SectionKind::other;
  Span span;
  // First offset after the heading line; equals span.start for headless sections.
  std::size_t body_start = 0;
};

struct Sentence {
  Span span;
  std::size_t section_index = 0;
};

struct DocumentMetadata {
  std::optional<std::string> title;
  std::optional<std::string> origin;
};

struct Document {
  std::string id;
  SourceFormat source_format = SourceFormat::plain_text;
  std::size_t raw_len = 0;
  std::u32string text;
  std::vector<Section> sections;
  std::vector<Sentence> sentences;
  DocumentMetadata metadata;

  std::u32string_view slice(Span span) const {
    return std::u32string_view(text).substr(span.start, span.length());
  }
  std::string slice_utf8(Span span) const;
};

}  // namespace das
