#include "ie/alignment.hpp"

#include "ie/errors.hpp"
#include "ie/text.hpp"

namespace ie {

namespace {

struct CollapsedView {
  std::string text;
  std::vector<std::size_t> source_byte;  // document byte offset of each byte of `text`
};

CollapsedView collapse_with_map(std::string_view s, std::size_t base) {
  CollapsedView v;
  bool pending = false;
  std::size_t pending_at = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (text::is_space(s[i])) {
      if (!pending) pending_at = i;
      pending = true;
      continue;
    }
    if (pending && !v.text.empty()) {
      v.text.push_back(' ');
      v.source_byte.push_back(base + pending_at);
    }
    pending = false;
    v.text.push_back(s[i]);
    v.source_byte.push_back(base + i);
  }
  return v;
}

const Sentence& sentence_for(const AnswerItem& item, const SegmentedDocument& doc) {
  if (!item.sent_id) throw SentIdOutOfRange("answer item '" + item.clue + "' carries no sentence id");
  if (*item.sent_id < 1 || *item.sent_id > doc.sentence_count())
    throw SentIdOutOfRange("sentence id " + std::to_string(*item.sent_id) + " outside document '" + doc.doc_id() +
                           "' with " + std::to_string(doc.sentence_count()) + " sentences");
  return doc.sentence(*item.sent_id);
}

// Search `key` in the sentence; nullopt when absent.
std::optional<SourceSpan> search(const Sentence& sentence, const SegmentedDocument& doc, std::string_view key,
                                 const AlignOptions& options) {
  const std::string needle = text::collapse_whitespace(key);
  if (needle.empty()) return std::nullopt;
  const auto view = collapse_with_map(sentence.text, doc.byte_offset(sentence.char_start));

  auto try_match = [&](const std::string& hay, const std::string& pat) -> std::optional<SourceSpan> {
    auto first = hay.find(pat);
    if (first == std::string::npos) return std::nullopt;
    SourceSpan span;
    span.sent_id = sentence.sent_id;
    span.char_start = doc.char_offset(view.source_byte[first]);
    span.char_end = doc.char_offset(view.source_byte[first + pat.size() - 1] + 1);
    span.ambiguous = hay.find(pat, first + 1) != std::string::npos;
    return span;
  };

  if (auto span = try_match(view.text, needle)) return span;
  if (options.case_insensitive_fallback) return try_match(text::fold_case(view.text), text::fold_case(needle));
  return std::nullopt;
}

}  // namespace

SourceSpan locate(const AnswerItem& item, const SegmentedDocument& doc, const AlignOptions& options) {
  if (!item.raw_text) return locate_without_raw(item, doc, options);
  const Sentence& sentence = sentence_for(item, doc);
  if (auto span = search(sentence, doc, *item.raw_text, options)) return *span;
  throw RawTextNotFound("raw text '" + *item.raw_text + "' not found in sentence " + std::to_string(sentence.sent_id) +
                        " of document '" + doc.doc_id() + "'");
}

SourceSpan locate_without_raw(const AnswerItem& item, const SegmentedDocument& doc, const AlignOptions& options) {
  const Sentence& sentence = sentence_for(item, doc);
  if (auto span = search(sentence, doc, item.value, options)) return *span;
  return {sentence.sent_id, sentence.char_start, sentence.char_end, true, true};
}

bool span_matches(const SegmentedDocument& doc, const SourceSpan& span, std::string_view key, bool fold_case) {
  auto found = text::collapse_whitespace(doc.substr(span.char_start, span.char_end));
  auto wanted = text::collapse_whitespace(key);
  if (fold_case) return text::fold_case(found) == text::fold_case(wanted);
  return found == wanted;
}

}  // namespace ie
