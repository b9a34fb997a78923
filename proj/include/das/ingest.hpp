#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "das/document.hpp"

namespace das {

struct InputDescriptor {
  SourceFormat format = SourceFormat::plain_text;
  // UTF-8 text, a serialized sectioned document, or raw PDF bytes.
  std::string content;
  DocumentMetadata metadata;
};

struct IngestOptions {
  std::vector<std::string> heading_lexicon;
  // Shell command template; "{input}" is replaced by the PDF path. The
  // command must print plain UTF-8 text on stdout.
  std::string converter_command;
};

std::vector<std::string> default_heading_lexicon();

// Builds a normalized Document. Throws Error with UnsupportedFormat,
// ConverterFailure, EmptyDocument or MalformedInput.
Document load_document(const InputDescriptor& source, const IngestOptions& options);

std::u32string normalize_text(std::u32string_view raw);
std::string normalize_text(std::string_view raw);

// Case-insensitive match against the heading lexicon, ignoring a leading
// section number ("7.", "2.1") and a trailing colon.
bool is_availability_heading(std::string_view heading,
                             const std::vector<std::string>& lexicon);

std::vector<Section> detect_sections(std::u32string_view text,
                                     const std::vector<std::string>& heading_lexicon);

std::vector<Sentence> segment_sentences(const Document& document);

// Runs the converter command on the PDF bytes and returns its stdout.
std::string run_pdf_converter(const std::string& command_template, std::string_view pdf);

}  // namespace das
