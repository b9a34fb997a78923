#include "das/links.hpp"

#include <algorithm>
#include <optional>
#include <unordered_set>

#include "das/error.hpp"
#include "das/unicode.hpp"

namespace das {

namespace {

constexpr std::u32string_view kTrailingPunct = U".,;:)]}'\"";

bool is_trailing_punct(char32_t c) { return kTrailingPunct.find(c) != std::u32string_view::npos; }

// Characters that end a link token in addition to whitespace.
bool is_token_stop(char32_t c) {
  return unicode::is_space(c) || c == U'<' || c == U'>' || c == U'"' || c == U'“' ||
         c == U'”' || c == U'‘' || c == U'’';
}

bool ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool starts_with_ci(std::u32string_view text, std::size_t pos, std::u32string_view prefix) {
  if (pos + prefix.size() > text.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (unicode::to_lower(text[pos + i]) != prefix[i]) return false;
  }
  return true;
}

bool ends_with_ci(std::u32string_view text, std::size_t end, std::u32string_view suffix) {
  if (suffix.size() > end) return false;
  return starts_with_ci(text, end - suffix.size(), suffix);
}

bool word_boundary_before(std::u32string_view text, std::size_t pos) {
  return pos == 0 || !unicode::is_word(text[pos - 1]);
}

// Extends a token from `pos` to the first stop character, then trims
// trailing punctuation.
std::size_t token_end(std::u32string_view text, std::size_t pos) {
  std::size_t end = pos;
  while (end < text.size() && !is_token_stop(text[end])) ++end;
  while (end > pos && is_trailing_punct(text[end - 1])) --end;
  return end;
}

// Length of "10.<4-9 digits>/" at pos, or 0.
std::size_t doi_core_prefix(std::u32string_view text, std::size_t pos) {
  if (pos + 3 > text.size() || text[pos] != U'1' || text[pos + 1] != U'0' ||
      text[pos + 2] != U'.') {
    return 0;
  }
  std::size_t i = pos + 3;
  while (i < text.size() && ascii_digit(text[i])) ++i;
  std::size_t digits = i - (pos + 3);
  if (digits < 4 || digits > 9 || i >= text.size() || text[i] != U'/') return 0;
  return i + 1 - pos;
}

bool url_is_doi(std::u32string_view url) {
  std::size_t p = 0;
  if (starts_with_ci(url, 0, U"https://")) p = 8;
  else if (starts_with_ci(url, 0, U"http://")) p = 7;
  else return false;
  for (std::u32string_view host : {U"dx.doi.org/", U"www.doi.org/", U"doi.org/"}) {
    if (starts_with_ci(url, p, host)) {
      std::size_t core = p + host.size();
      std::size_t prefix = doi_core_prefix(url, core);
      return prefix > 0 && core + prefix < url.size();
    }
  }
  return false;
}

struct RawLink {
  LinkKind kind;
  Span span;
};

std::vector<RawLink> scan_urls(std::u32string_view text) {
  std::vector<RawLink> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t scheme = 0;
    if (word_boundary_before(text, i)) {
      if (starts_with_ci(text, i, U"https://")) scheme = 8;
      else if (starts_with_ci(text, i, U"http://")) scheme = 7;
    }
    if (scheme == 0) {
      ++i;
      continue;
    }
    std::size_t end = token_end(text, i);
    if (end <= i + scheme) {
      i += scheme;
      continue;
    }
    auto token = text.substr(i, end - i);
    out.push_back({url_is_doi(token) ? LinkKind::doi : LinkKind::url, {i, end}});
    i = end;
  }
  return out;
}

bool inside_any(const std::vector<RawLink>& links, std::size_t pos) {
  return std::any_of(links.begin(), links.end(), [pos](const RawLink& l) {
    return l.span.start <= pos && pos < l.span.end;
  });
}

// Start of an optional "doi:" / "doi.org/" prefix ending at `core`.
std::size_t doi_prefix_start(std::u32string_view text, std::size_t core) {
  for (std::u32string_view host : {U"dx.doi.org/", U"www.doi.org/", U"doi.org/"}) {
    if (ends_with_ci(text, core, host) && word_boundary_before(text, core - host.size())) {
      return core - host.size();
    }
  }
  // "doi:10.x" or "doi: 10.x"
  std::size_t p = core;
  if (p > 0 && text[p - 1] == U' ') --p;
  if (ends_with_ci(text, p, U"doi:") && word_boundary_before(text, p - 4)) return p - 4;
  return core;
}

void scan_dois(std::u32string_view text, std::vector<RawLink>& found) {
  std::vector<RawLink> dois;
  for (std::size_t i = 0; i + 3 < text.size(); ++i) {
    if (text[i] != U'1' || !word_boundary_before(text, i) || inside_any(found, i)) continue;
    std::size_t prefix = doi_core_prefix(text, i);
    if (prefix == 0) continue;
    std::size_t end = token_end(text, i);
    if (end <= i + prefix) continue;
    dois.push_back({LinkKind::doi, {doi_prefix_start(text, i), end}});
    i = end - 1;
  }
  found.insert(found.end(), dois.begin(), dois.end());
}

bool is_accession(std::u32string_view token) {
  auto all_digits = [](std::u32string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), ascii_digit);
  };
  auto has_prefix = [&](std::u32string_view p) {
    return token.size() > p.size() && token.substr(0, p.size()) == p;
  };
  for (std::u32string_view p : {U"GSE", U"SRR", U"PRJNA", U"PRJEB", U"PRJDB"}) {
    if (has_prefix(p) && all_digits(token.substr(p.size()))) return true;
  }
  std::size_t letters = 0;
  while (letters < token.size() && token[letters] >= U'A' && token[letters] <= U'Z') ++letters;
  std::size_t digits = token.size() - letters;
  return letters >= 1 && letters <= 2 && digits >= 5 && digits <= 8 &&
         all_digits(token.substr(letters));
}

void scan_accessions(std::u32string_view text, std::vector<RawLink>& found) {
  std::u32string lower = unicode::to_lower(text);
  if (lower.find(U"accession") == std::u32string::npos) return;
  std::vector<RawLink> accessions;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!unicode::is_word(text[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && unicode::is_word(text[end])) ++end;
    if (!inside_any(found, i) && is_accession(text.substr(i, end - i))) {
      accessions.push_back({LinkKind::accession, {i, end}});
    }
    i = end;
  }
  found.insert(found.end(), accessions.begin(), accessions.end());
}

}  // namespace

std::string_view to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::url: return "url";
    case LinkKind::doi: return "doi";
    case LinkKind::accession: return "accession";
  }
  return "url";
}

std::vector<Span> find_link_tokens(std::u32string_view text) {
  auto found = scan_urls(text);
  scan_dois(text, found);
  std::vector<Span> spans;
  spans.reserve(found.size());
  for (const auto& link : found) spans.push_back(link.span);
  std::sort(spans.begin(), spans.end());
  return spans;
}

std::vector<ResourceLink> extract_links(std::u32string_view text, std::size_t base_offset) {
  auto found = scan_urls(text);
  scan_dois(text, found);
  scan_accessions(text, found);
  std::sort(found.begin(), found.end(),
            [](const RawLink& a, const RawLink& b) { return a.span < b.span; });

  std::vector<ResourceLink> links;
  std::unordered_set<std::string> seen;
  for (const auto& raw : found) {
    std::string raw_text = unicode::to_utf8(text.substr(raw.span.start, raw.span.length()));
    std::string canonical;
    try {
      canonical = canonicalize(raw.kind, raw_text);
    } catch (const Error&) {
      continue;
    }
    if (!seen.insert(canonical).second) continue;
    links.push_back({raw.kind, std::move(raw_text), std::move(canonical),
                     {raw.span.start + base_offset, raw.span.end + base_offset}});
  }
  return links;
}

std::string normalize_doi(std::string_view raw) {
  auto lower_starts = [](std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      char c = s[i];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
      if (c != prefix[i]) return false;
    }
    return true;
  };
  auto ltrim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
  };

  std::string_view s = ltrim(raw);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (lower_starts(s, "doi:")) s = ltrim(s.substr(4));
  if (lower_starts(s, "https://")) s.remove_prefix(8);
  else if (lower_starts(s, "http://")) s.remove_prefix(7);
  for (std::string_view host : {"dx.doi.org/", "www.doi.org/", "doi.org/"}) {
    if (lower_starts(s, host)) {
      s.remove_prefix(host.size());
      break;
    }
  }
  if (!lower_starts(s, "10.")) {
    throw Error(ErrorCode::NotADoi, "not a DOI: " + std::string(raw));
  }
  std::string out(s);
  std::size_t slash = out.find('/');
  std::size_t stop = slash == std::string::npos ? out.size() : slash;
  for (std::size_t i = 0; i < stop; ++i) {
    if (out[i] >= 'A' && out[i] <= 'Z') out[i] = static_cast<char>(out[i] + 32);
  }
  return out;
}

std::string canonicalize_url(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t scheme_end = raw.find("://");
  std::size_t host_end = raw.size();
  if (scheme_end != std::string_view::npos) {
    host_end = raw.find_first_of("/?#", scheme_end + 3);
    if (host_end == std::string_view::npos) host_end = raw.size();
  } else {
    host_end = 0;
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (i < host_end && c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    if (c == '|') {
      out += "%7C";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string canonicalize(LinkKind kind, std::string_view raw) {
  switch (kind) {
    case LinkKind::doi: return normalize_doi(raw);
    case LinkKind::url: return canonicalize_url(raw);
    case LinkKind::accession: return std::string(raw);
  }
  return std::string(raw);
}

}  // namespace das
