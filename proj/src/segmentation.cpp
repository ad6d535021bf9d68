#include "ie/segmentation.hpp"

#include <algorithm>

#include "ie/errors.hpp"
#include "ie/text.hpp"

namespace ie {

SegmentedDocument::SegmentedDocument(std::string doc_id, std::string original_text, std::vector<Sentence> sentences)
    : doc_id_(std::move(doc_id)),
      original_text_(std::move(original_text)),
      sentences_(std::move(sentences)),
      starts_(text::codepoint_starts(original_text_)) {}

const Sentence& SegmentedDocument::sentence(int sent_id) const {
  if (sent_id < 1 || sent_id > sentence_count())
    throw RangeError("sentence id " + std::to_string(sent_id) + " outside [1, " + std::to_string(sentence_count()) +
                     "] in document '" + doc_id_ + "'");
  return sentences_[static_cast<std::size_t>(sent_id - 1)];
}

int SegmentedDocument::sentence_at(std::size_t char_offset) const {
  auto it = std::upper_bound(sentences_.begin(), sentences_.end(), char_offset,
                             [](std::size_t off, const Sentence& s) { return off < s.char_end; });
  if (it == sentences_.end() || char_offset < it->char_start) return 0;
  return it->sent_id;
}

std::size_t SegmentedDocument::byte_offset(std::size_t char_offset) const {
  if (char_offset >= starts_.size()) throw RangeError("character offset past end of document");
  return starts_[char_offset];
}

std::size_t SegmentedDocument::char_offset(std::size_t byte_offset) const {
  auto it = std::lower_bound(starts_.begin(), starts_.end(), byte_offset);
  return static_cast<std::size_t>(it - starts_.begin());
}

std::string_view SegmentedDocument::substr(std::size_t char_start, std::size_t char_end) const {
  if (char_start > char_end || char_end > char_length()) throw RangeError("character span outside document");
  auto b = starts_[char_start];
  return std::string_view(original_text_).substr(b, starts_[char_end] - b);
}

SegmentedDocument segment(std::string doc_id, std::string text) {
  if (text::trim(text).empty()) throw EmptyDocumentError("document '" + doc_id + "' has no text");

  std::vector<Sentence> sentences;
  std::size_t char_pos = 0;  // code point index of `i`
  std::size_t i = 0;
  const auto n = text.size();
  while (i <= n) {
    std::size_t line_end = i;
    while (line_end < n && text[line_end] != '\n' && text[line_end] != '\r') ++line_end;
    std::string_view line(text.data() + i, line_end - i);

    std::size_t lead = 0;
    while (lead < line.size() && text::is_space(line[lead])) ++lead;
    std::size_t tail = line.size();
    while (tail > lead && text::is_space(line[tail - 1])) --tail;
    if (tail > lead) {
      // whitespace is ASCII, so leading bytes == leading code points
      std::size_t start = char_pos + lead;
      auto content = line.substr(lead, tail - lead);
      std::size_t len = text::length(content);
      sentences.push_back({static_cast<int>(sentences.size()) + 1, start, start + len, std::string(content)});
    }
    char_pos += text::length(line);

    if (line_end >= n) break;
    std::size_t sep = (text[line_end] == '\r' && line_end + 1 < n && text[line_end + 1] == '\n') ? 2 : 1;
    char_pos += sep;
    i = line_end + sep;
  }
  return SegmentedDocument(std::move(doc_id), std::move(text), std::move(sentences));
}

std::string sentinel(int sent_id) { return "[SENT" + std::to_string(sent_id) + "]"; }

std::string render_context(const SegmentedDocument& doc, SentenceRange range, bool with_sentinels) {
  if (range.first < 1 || range.last > doc.sentence_count() || range.first > range.last)
    throw RangeError("sentence range [" + std::to_string(range.first) + ", " + std::to_string(range.last) +
                     "] invalid for document '" + doc.doc_id() + "'");
  std::string out;
  for (int id = range.first; id <= range.last; ++id) {
    if (!out.empty()) out += ' ';
    if (with_sentinels) {
      out += sentinel(id);
      out += ' ';
    }
    out += doc.sentence(id).text;
  }
  return out;
}

namespace {

// Cut the single sentence `sent_id` down to the longest prefix (in code points)
// that fits the budget together with the question.
Window truncated_window(const SegmentedDocument& doc, int sent_id, std::size_t question_tokens, std::size_t budget,
                        const TokenCounter& counter, bool with_sentinels) {
  std::string prefix = with_sentinels ? sentinel(sent_id) + " " : std::string();
  auto cps = text::decode(doc.sentence(sent_id).text);
  auto render = [&](std::size_t keep) { return prefix + text::encode(std::u32string_view(cps).substr(0, keep)); };

  std::size_t lo = 0, hi = cps.size();  // lo always fits
  if (counter.count(render(0)) + question_tokens > budget)
    throw OversizeSentenceError("question alone exceeds the token budget of " + std::to_string(budget));
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo + 1) / 2;
    if (counter.count(render(mid)) + question_tokens <= budget)
      lo = mid;
    else
      hi = mid - 1;
  }
  Window w;
  w.range = {sent_id, sent_id};
  w.rendered_context = render(lo);
  w.token_count = counter.count(w.rendered_context) + question_tokens;
  w.truncated = true;
  return w;
}

}  // namespace

std::vector<Window> build_windows(const SegmentedDocument& doc,
                                  std::string_view question,
                                  std::size_t budget,
                                  const TokenCounter& counter,
                                  bool with_sentinels,
                                  OversizePolicy policy,
                                  std::vector<std::string>* warnings) {
  if (budget == 0) throw RangeError("token budget must be positive");
  if (doc.sentence_count() == 0) throw EmptyDocumentError("document '" + doc.doc_id() + "' has no sentences");

  const std::size_t question_tokens = counter.count(question);
  const int last_id = doc.sentence_count();
  std::vector<Window> windows;
  int start = 1;
  while (true) {
    std::string context;
    std::size_t tokens = 0;
    int end = start - 1;
    for (int id = start; id <= last_id; ++id) {
      std::string candidate = context;
      if (!candidate.empty()) candidate += ' ';
      if (with_sentinels) candidate += sentinel(id) + " ";
      candidate += doc.sentence(id).text;
      std::size_t t = counter.count(candidate) + question_tokens;
      if (t > budget) break;
      context = std::move(candidate);
      tokens = t;
      end = id;
    }

    Window w;
    if (end < start) {
      if (policy == OversizePolicy::error)
        throw OversizeSentenceError("sentence " + std::to_string(start) + " of document '" + doc.doc_id() +
                                    "' does not fit the token budget with its question");
      w = truncated_window(doc, start, question_tokens, budget, counter, with_sentinels);
      if (warnings)
        warnings->push_back("document '" + doc.doc_id() + "': sentence " + std::to_string(start) +
                            " truncated to fit the token budget");
    } else {
      w.range = {start, end};
      w.rendered_context = std::move(context);
      w.token_count = tokens;
    }
    w.window_index = static_cast<int>(windows.size());
    const int k = w.range.size();
    const bool done = w.range.last == last_id;
    windows.push_back(std::move(w));
    if (done) break;
    start += (k + 1) / 2;
  }
  return windows;
}

}  // namespace ie
