#include <doctest.h>

#include <random>

#include "ie/errors.hpp"
#include "ie/segmentation.hpp"
#include "ie/text.hpp"
#include "oracles.hpp"

using namespace ie;

namespace {

// One token per whitespace-separated word.
class WordCounter final : public TokenCounter {
 public:
  std::size_t count(std::string_view s) const override { return oracle::words(std::string(s)).size(); }
  std::string identity() const override { return "words"; }
};

SegmentedDocument lines(int n) {
  std::string text;
  for (int i = 1; i <= n; ++i) text += "s" + std::to_string(i) + "\n";
  return segment("d", text);
}

std::vector<SentenceRange> ranges(const std::vector<Window>& ws) {
  std::vector<SentenceRange> out;
  for (const auto& w : ws) out.push_back(w.range);
  return out;
}

}  // namespace

TEST_CASE("line segmentation keeps code point offsets") {
  auto doc = segment("d", "  Apartment type nº 32,\r\nlocated on the 10th floor\n\n\rárea 64,020 m²  ");
  REQUIRE(doc.sentence_count() == 3);
  CHECK(doc.sentence(1).text == "Apartment type nº 32,");
  CHECK(doc.sentence(1).char_start == 2);
  CHECK(doc.sentence(1).char_end == 23);
  CHECK(doc.sentence(3).text == "área 64,020 m²");
  for (const auto& s : doc.sentences()) CHECK(doc.substr(s.char_start, s.char_end) == s.text);
  CHECK(doc.sentence_at(doc.sentence(3).char_start + 1) == 3);
  CHECK(doc.sentence_at(0) == 0);
  CHECK_THROWS_AS(doc.sentence(4), RangeError);
  CHECK_THROWS_AS(doc.sentence(0), RangeError);
  CHECK_THROWS_AS(segment("e", " \n\t\n"), EmptyDocumentError);
}

TEST_CASE("rendered contexts with and without sentinels") {
  auto doc = segment("t1",
                     "Apartment type nº 32,\nlocated on the 10th floor of the Central Building,\n"
                     "situated at 1208 Santos Dumont St.,\nhaving a private covered built area of 64,020 square meters,\n"
                     "a common covered built area of 44,509 square meters...");
  CHECK(render_context(doc, {1, 2}, true) ==
        "[SENT1] Apartment type nº 32, [SENT2] located on the 10th floor of the Central Building,");
  CHECK(render_context(doc, {4, 4}, true) == "[SENT4] having a private covered built area of 64,020 square meters,");
  CHECK(render_context(doc, {1, 2}, false) == "Apartment type nº 32, located on the 10th floor of the Central Building,");
}

TEST_CASE("fifteen sentences, ten per window") {
  WordCounter words;
  auto ws = build_windows(lines(15), "q", 11, words, false);
  CHECK(ranges(ws) == std::vector<SentenceRange>{{1, 10}, {6, 15}});
  CHECK(ws[0].window_index == 0);
  CHECK(ws[1].window_index == 1);
  CHECK(ws[0].token_count == 11);
}

TEST_CASE("short documents fit one window") {
  WordCounter words;
  CHECK(ranges(build_windows(lines(3), "q", 100, words, true)) == std::vector<SentenceRange>{{1, 3}});
}

TEST_CASE("oversize sentences are truncated or rejected") {
  WordCounter words;
  auto doc = segment("d", "a b c d e f g h\ni\nj");
  std::vector<std::string> warnings;
  auto ws = build_windows(doc, "q", 4, words, false, OversizePolicy::truncate, &warnings);
  REQUIRE(!ws.empty());
  CHECK(ws[0].truncated);
  CHECK(ws[0].range == SentenceRange{1, 1});
  CHECK(ws[0].token_count <= 4);
  CHECK(warnings.size() == 1);
  CHECK(ws.back().range.last == 3);
  CHECK_THROWS_AS(build_windows(doc, "q", 4, words, false, OversizePolicy::error), OversizeSentenceError);
  CHECK_THROWS_AS(build_windows(doc, "q q q q q", 4, words, false), OversizeSentenceError);
}

TEST_CASE("approximate counter") {
  ApproximateTokenCounter c;
  CHECK(c.count("") == 0);
  CHECK(c.count("abc") == 1);
  CHECK(c.count("abcd") == 2);
  CHECK(c.count("m²m²m²m") == 2);
  CHECK_THROWS_AS(ApproximateTokenCounter(0.0), RangeError);
}

TEST_CASE("windows agree with brute-force enumeration") {
  std::mt19937 rng(99);
  ApproximateTokenCounter approx;
  auto count = [&](const std::string& s) { return approx.count(s); };
  for (int trial = 0; trial < 60; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 80)(rng);
    std::vector<std::string> sentences;
    std::string text;
    for (int i = 0; i < n; ++i) {
      std::string s = "line" + std::to_string(i);
      for (int w = std::uniform_int_distribution<int>(0, 12)(rng); w > 0; --w) s += " wórd";
      sentences.push_back(s);
      text += s + "\n";
    }
    const bool sentinels = trial % 2 == 0;
    const std::size_t budget = std::uniform_int_distribution<std::size_t>(20, 200)(rng);
    const std::string question = "What is the value?";
    auto got = build_windows(segment("d", text), question, budget, approx, sentinels);
    auto want = oracle::windows(sentences, approx.count(question), budget, count, sentinels);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].range.first == want[i].first);
      CHECK(got[i].range.last == want[i].last);
      if (!got[i].truncated) CHECK(got[i].token_count <= budget);
    }
  }
}
