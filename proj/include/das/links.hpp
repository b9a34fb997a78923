#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "das/document.hpp"

namespace das {

enum class LinkKind { url, doi, accession };

std::string_view to_string(LinkKind kind);

struct ResourceLink {
  LinkKind kind = LinkKind::url;
  std::string raw;        // verbatim text at span
  std::string canonical;  // normalized identifier
  Span span;              // absolute offsets

  bool operator==(const ResourceLink&) const = default;
};

// Finds URLs, DOIs and (when the text mentions "accession") database
// accessions in `text`, a slice of document text beginning at `base_offset`.
// Results are ordered by span start; duplicate canonical values keep the
// first occurrence. A DOI wrapped in a doi.org URL is one link of kind doi.
std::vector<ResourceLink> extract_links(std::u32string_view text, std::size_t base_offset = 0);

// URL and DOI token spans relative to `text`, no accession scan and no
// de-duplication. Sentence splitting never cuts inside one of these.
std::vector<Span> find_link_tokens(std::u32string_view text);

// Strips "doi:", scheme and (dx.)doi.org/ prefixes and lowercases the
// registrant part. Throws Error(NotADoi) when the residue lacks "10.".
std::string normalize_doi(std::string_view raw);

// Lowercases scheme and host, percent-encodes '|'.
std::string canonicalize_url(std::string_view raw);

std::string canonicalize(LinkKind kind, std::string_view raw);

}  // namespace das
