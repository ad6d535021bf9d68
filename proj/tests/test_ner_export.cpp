#include <doctest.h>

#include <random>
#include <sstream>

#include "ie/errors.hpp"
#include "ie/ner_export.hpp"
#include "ie/text.hpp"

using namespace ie;

namespace {

GoldAnnotation span_ann(std::string field, std::size_t a, std::size_t b, const std::string& text) {
  const auto cps = text::decode(text);
  return {std::move(field), "x", RawSpan{text::encode(std::u32string_view(cps).substr(a, b - a)), a, b}, std::nullopt};
}

}  // namespace

TEST_CASE("BIO tags split at span edges") {
  const std::string text = "área 64,020 m² em São Paulo.";
  std::vector<EntitySpan> spans{{"value", 5, 11}, {"city", 18, 27}};
  auto toks = to_bio(text, spans);
  std::vector<std::string> tags;
  for (const auto& t : toks) tags.push_back(t.text + "/" + t.tag);
  CHECK(tags == std::vector<std::string>{"área/O", "64/B-value", ",/I-value", "020/I-value", "m²/O", "em/O",
                                         "São/B-city", "Paulo/I-city", "./O"});
  CHECK(is_valid_bio(toks));
  CHECK(from_bio(toks) == spans);
}

TEST_CASE("spans inside words force token splits") {
  const std::string text = "ZIP01310100x";
  std::vector<EntitySpan> spans{{"zip", 3, 11}};
  auto toks = to_bio(text, spans);
  CHECK(from_bio(toks) == spans);
}

TEST_CASE("bad spans") {
  CHECK_THROWS_AS(to_bio("abc def", {{"a", 0, 5}, {"b", 4, 7}}), OverlapError);
  CHECK_THROWS_AS(to_bio("abc def", {{"a", 0, 4}}), RangeError);
  CHECK_THROWS_AS(to_bio("abc", {{"a", 1, 9}}), RangeError);
  CHECK_THROWS_AS(to_bio("abc", {{"a", 1, 1}}), RangeError);
}

TEST_CASE("BIO validity") {
  CHECK(is_valid_bio({{"a", 0, 1, "B-x"}, {"b", 2, 3, "I-x"}, {"c", 4, 5, "O"}}));
  CHECK_FALSE(is_valid_bio({{"a", 0, 1, "I-x"}}));
  CHECK_FALSE(is_valid_bio({{"a", 0, 1, "B-x"}, {"b", 2, 3, "I-y"}}));
  CHECK_FALSE(is_valid_bio({{"a", 0, 1, "X"}}));
}

TEST_CASE("random span round trip") {
  std::mt19937 rng(23);
  auto u = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const std::vector<std::string> words{"rua", "São", "64,020", "m²", "nº", "(x)", "CEP", "01310-100", "a.b"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    std::vector<std::pair<std::size_t, std::size_t>> word_pos;
    for (int i = u(1, 15); i > 0; --i) {
      if (!text.empty()) text += u(0, 4) ? " " : "\n";
      const auto& w = words[static_cast<std::size_t>(u(0, int(words.size()) - 1))];
      const std::size_t start = text::length(text);
      text += w;
      word_pos.push_back({start, start + text::length(w)});
    }
    std::vector<EntitySpan> spans;
    for (std::size_t i = 0; i < word_pos.size();) {
      if (u(0, 2) == 0) {
        const std::size_t j = std::min(word_pos.size() - 1, i + static_cast<std::size_t>(u(0, 2)));
        spans.push_back({u(0, 1) ? "a" : "b", word_pos[i].first, word_pos[j].second});
        i = j + 1 + static_cast<std::size_t>(u(0, 1));  // adjacent spans are allowed
      } else {
        ++i;
      }
    }
    auto toks = to_bio(text, spans);
    CHECK(is_valid_bio(toks));
    CHECK(from_bio(toks) == spans);
  }
}

TEST_CASE("reduce_corpus drops overlapping classes and documents") {
  const std::string t = "Rua das Flores 12 Curitiba";
  std::vector<DocumentRecord> docs;
  for (int i = 0; i < 10; ++i) {
    DocumentRecord d{"d" + std::to_string(i), "property", t, {}};
    d.annotations.push_back(span_ann("street", 0, 14, t));
    d.annotations.push_back(span_ann("city", 18, 26, t));
    d.annotations.push_back({"status", "ok", std::nullopt, 1});
    if (i < 2) d.annotations.push_back(span_ann("address", 0, 17, t));  // overlaps street in 2/10 docs
    if (i == 5) d.annotations.push_back(span_ann("number", 15, 17, t));
    if (i == 5) d.annotations.push_back(span_ann("number_full", 8, 17, t));
    docs.push_back(std::move(d));
  }
  ReduceOptions opts;
  opts.overlap_fraction = 0.15;
  auto r = reduce_corpus(docs, opts);
  CHECK(r.report.classification_fields == std::set<std::string>{"status"});
  CHECK(r.report.overlapping_fields == std::set<std::string>{"address", "street"});
  CHECK(r.report.removed_documents == std::vector<std::string>{"d5"});
  CHECK(r.report.documents_out == 9);
  CHECK(r.report.document_retention() == doctest::Approx(0.9));
  for (const auto& d : r.documents) CHECK_FALSE(has_overlap(d.spans));

  std::ostringstream out;
  write_conll(out, r.documents);
  CHECK(out.str().starts_with("-DOCSTART- -X- -X- O\n\nRua 0 3 O\n"));
  CHECK(out.str().find("Curitiba 18 26 B-city\n") != std::string::npos);
}

TEST_CASE("CoNLL output breaks at source lines") {
  std::ostringstream out;
  write_conll(out, {{"d", "a b\nc", {{"x", 4, 5}}}});
  CHECK(out.str() == "-DOCSTART- -X- -X- O\n\na 0 1 O\nb 2 3 O\n\nc 4 5 B-x\n\n");
}
