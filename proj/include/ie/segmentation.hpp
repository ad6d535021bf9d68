#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ie/token_counter.hpp"

namespace ie {

/// One line of the document. Offsets are code point offsets into the
/// original text, end exclusive.
struct Sentence {
  int sent_id = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string text;

  bool operator==(const Sentence&) const = default;
};

struct SentenceRange {
  int first = 0;
  int last = 0;  // inclusive

  int size() const { return last - first + 1; }
  bool contains(int sent_id) const { return sent_id >= first && sent_id <= last; }
  bool operator==(const SentenceRange&) const = default;
};

class SegmentedDocument {
 public:
  SegmentedDocument() = default;
  SegmentedDocument(std::string doc_id, std::string original_text, std::vector<Sentence> sentences);

  const std::string& doc_id() const { return doc_id_; }
  const std::string& original_text() const { return original_text_; }
  const std::vector<Sentence>& sentences() const { return sentences_; }
  int sentence_count() const { return static_cast<int>(sentences_.size()); }

  /// Throws RangeError for ids outside [1, sentence_count()].
  const Sentence& sentence(int sent_id) const;
  /// Sentence whose range holds the code point offset, or 0 when none does.
  int sentence_at(std::size_t char_offset) const;

  std::size_t char_length() const { return starts_.size() - 1; }
  std::size_t byte_offset(std::size_t char_offset) const;
  std::size_t char_offset(std::size_t byte_offset) const;
  std::string_view substr(std::size_t char_start, std::size_t char_end) const;

 private:
  std::string doc_id_;
  std::string original_text_;
  std::vector<Sentence> sentences_;
  std::vector<std::size_t> starts_{0};  // byte offset of each code point, plus end
};

/// Split on line breaks (\n, \r\n, \r). Blank lines produce no sentence;
/// sentence text has surrounding whitespace trimmed. Ids start at 1.
/// Throws EmptyDocumentError when text has no non-whitespace character.
SegmentedDocument segment(std::string doc_id, std::string text);

/// "[SENT1] a [SENT2] b" with sentinels, "a b" without.
std::string render_context(const SegmentedDocument& doc, SentenceRange range, bool with_sentinels);

std::string sentinel(int sent_id);

enum class OversizePolicy { truncate, error };

struct Window {
  int window_index = 0;
  SentenceRange range;
  std::string rendered_context;
  std::size_t token_count = 0;  // context + question
  bool truncated = false;

  bool operator==(const Window&) const = default;
};

/// Greedy 50%-overlap windows: each window is the longest run of sentences
/// from its start whose context plus question fits the budget; the next
/// window starts ceil(k/2) sentences later. A single sentence that cannot
/// fit is truncated (and noted in `warnings`) or rejected, per policy.
std::vector<Window> build_windows(const SegmentedDocument& doc,
                                  std::string_view question,
                                  std::size_t budget,
                                  const TokenCounter& counter,
                                  bool with_sentinels,
                                  OversizePolicy policy = OversizePolicy::truncate,
                                  std::vector<std::string>* warnings = nullptr);

}  // namespace ie
