#include <doctest.h>

#include <set>

#include "das/error.hpp"
#include "das/links.hpp"
#include "das/unicode.hpp"
#include "fuzz.hpp"
#include "test_support.hpp"

using das::LinkKind;
using das::unicode::from_utf8;
using das::unicode::to_utf8;

namespace {

std::vector<das::ResourceLink> links_in(const std::string& text) {
  return das::extract_links(from_utf8(text));
}

}  // namespace

TEST_CASE("doi url with trailing period") {
  auto links = links_in("at https://doi.org/10.5281/zenodo.100.");
  REQUIRE(links.size() == 1);
  CHECK(links[0].kind == LinkKind::doi);
  CHECK(links[0].raw == "https://doi.org/10.5281/zenodo.100");
  CHECK(links[0].canonical == "10.5281/zenodo.100");
  CHECK(links[0].span.start == 3);
  CHECK(links[0].span.end == 3 + links[0].raw.size());
}

TEST_CASE("accessions need the accession keyword") {
  CHECK(links_in("Sequencing reads are in GSE12345.").empty());

  auto links = links_in("Reads are under accession numbers GSE12345 and PRJNA54321.");
  REQUIRE(links.size() == 2);
  CHECK(links[0].kind == LinkKind::accession);
  CHECK(links[0].canonical == "GSE12345");
  CHECK(links[1].canonical == "PRJNA54321");

  auto genbank = links_in("GenBank accession AB123456 was used.");
  REQUIRE(genbank.size() == 1);
  CHECK(genbank[0].raw == "AB123456");
}

TEST_CASE("bare and prefixed dois") {
  auto links = links_in("See doi:10.1000/XYZ-1 and 10.5061/dryad.abc (Dryad).");
  REQUIRE(links.size() == 2);
  CHECK(links[0].raw == "doi:10.1000/XYZ-1");
  CHECK(links[0].canonical == "10.1000/XYZ-1");
  CHECK(links[1].raw == "10.5061/dryad.abc");
}

TEST_CASE("plain urls") {
  auto links = links_in("Code: <https://GitHub.com/Org/Tool>, mirror at (http://example.org/a/b).");
  REQUIRE(links.size() == 2);
  CHECK(links[0].kind == LinkKind::url);
  CHECK(links[0].raw == "https://GitHub.com/Org/Tool");
  CHECK(links[0].canonical == "https://github.com/Org/Tool");
  CHECK(links[1].raw == "http://example.org/a/b");
}

TEST_CASE("duplicates collapse by canonical value") {
  auto links = links_in("doi:10.1000/abc then https://doi.org/10.1000/abc again");
  REQUIRE(links.size() == 1);
  CHECK(links[0].raw == "doi:10.1000/abc");
}

TEST_CASE("spans are shifted by the base offset") {
  auto links = das::extract_links(from_utf8("x https://a.org/b"), 100);
  REQUIRE(links.size() == 1);
  CHECK(links[0].span.start == 102);
}

TEST_CASE("offsets count code points") {
  std::string text = "Dat\xC3\xA4 \xE2\x80\x94 https://a.org/x";
  auto links = links_in(text);
  REQUIRE(links.size() == 1);
  auto u32 = from_utf8(text);
  CHECK(to_utf8(std::u32string_view(u32).substr(links[0].span.start, links[0].span.length())) ==
        links[0].raw);
  CHECK(links[0].span.start == 7);
}

TEST_CASE("normalize_doi") {
  CHECK(das::normalize_doi("https://doi.org/10.5281/zenodo.100") == "10.5281/zenodo.100");
  CHECK(das::normalize_doi("doi:10.1000/ABC") == "10.1000/ABC");
  CHECK(das::normalize_doi("DOI: 10.1000/abc") == "10.1000/abc");
  CHECK(das::normalize_doi("http://dx.doi.org/10.1000/abc") == "10.1000/abc");
  CHECK_THROWS_AS(das::normalize_doi("https://example.org/x"), das::Error);
  try {
    das::normalize_doi("not a doi");
    FAIL("expected NotADoi");
  } catch (const das::Error& e) {
    CHECK(e.code() == das::ErrorCode::NotADoi);
  }
}

TEST_CASE("normalize_doi is idempotent over corpus links") {
  testing::LinkFuzzer fuzz(11);
  for (int i = 0; i < 300; ++i) {
    auto link = fuzz.doi();
    auto once = das::normalize_doi(link.raw);
    CHECK(once == link.canonical);
    CHECK(das::normalize_doi(once) == once);
  }
}

TEST_CASE("pipe in url is percent-encoded") {
  auto links = links_in("Data at https://example.org/q?a=1|2 today");
  REQUIRE(links.size() == 1);
  CHECK(links[0].raw == "https://example.org/q?a=1|2");
  CHECK(links[0].canonical == "https://example.org/q?a=1%7C2");
  CHECK(das::canonicalize_url(links[0].canonical) == links[0].canonical);
}

TEST_CASE("canonicalize is idempotent") {
  testing::LinkFuzzer fuzz(5);
  for (int i = 0; i < 300; ++i) {
    auto url = fuzz.url();
    auto c = das::canonicalize(LinkKind::url, url.raw);
    CHECK(c == url.canonical);
    CHECK(das::canonicalize(LinkKind::url, c) == c);
  }
}

TEST_CASE("fuzzed documents recover every planted link") {
  testing::LinkFuzzer fuzz(2024);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<testing::PlantedLink> planted;
    std::string raw = fuzz.document(fuzz.between(1, 5), planted);
    auto doc = testing::make_document(raw);
    auto links = das::extract_links(doc.text);
    std::set<std::string> found;
    for (const auto& link : links) {
      found.insert(link.canonical);
      CHECK(doc.slice_utf8(link.span) == link.raw);
    }
    for (const auto& p : planted) {
      INFO("document: " << raw);
      CHECK_MESSAGE(found.count(p.canonical) == 1, "missing " << p.canonical);
    }
  }
}
