#pragma once

#include <cstddef>

#include "ie/answer_codec.hpp"
#include "ie/segmentation.hpp"

namespace ie {

/// Location of an answer in the original document, in code point offsets.
struct SourceSpan {
  int sent_id = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  bool ambiguous = false;       // more than one occurrence, or sentence-level only
  bool sentence_level = false;  // whole-sentence span: the key was not found verbatim

  bool operator==(const SourceSpan&) const = default;
};

struct AlignOptions {
  /// Retry with case folding when the exact (whitespace-collapsed) search fails.
  bool case_insensitive_fallback = true;
};

/// Find item.raw_text inside sentence item.sent_id. Falls back to
/// locate_without_raw when the item has no raw text.
/// Throws SentIdOutOfRange or RawTextNotFound.
SourceSpan locate(const AnswerItem& item, const SegmentedDocument& doc, const AlignOptions& options = {});

/// Search the canonical value verbatim; on failure return the whole sentence
/// with ambiguous and sentence_level set. Throws SentIdOutOfRange.
SourceSpan locate_without_raw(const AnswerItem& item, const SegmentedDocument& doc, const AlignOptions& options = {});

/// Whitespace-collapsed view of a document substring, for soundness checks.
bool span_matches(const SegmentedDocument& doc, const SourceSpan& span, std::string_view key, bool fold_case = false);

}  // namespace ie
