#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ie/document.hpp"
#include "ie/metrics.hpp"

namespace ie {

struct EntitySpan {
  std::string label;
  std::size_t char_start = 0;
  std::size_t char_end = 0;  // exclusive, code points

  bool operator==(const EntitySpan&) const = default;
};

struct TaggedToken {
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string tag;  // "B-x", "I-x" or "O"

  bool operator==(const TaggedToken&) const = default;
};

struct NerDocument {
  std::string doc_id;
  std::string text;
  std::vector<EntitySpan> spans;
};

struct ReduceOptions {
  /// A class is dropped when it overlaps another class in more than this
  /// fraction of the corpus documents.
  double overlap_fraction = 0.01;
};

struct ReductionReport {
  std::size_t documents_in = 0, documents_out = 0;
  std::size_t fields_in = 0, fields_out = 0;
  std::set<std::string> classification_fields;  // never carry a span
  std::set<std::string> overlapping_fields;     // dropped by the overlap threshold
  std::vector<std::string> removed_documents;

  double document_retention() const;
  nlohmann::json to_json() const;
};

struct ReducedCorpus {
  std::vector<NerDocument> documents;
  ReductionReport report;
};

ReducedCorpus reduce_corpus(const std::vector<DocumentRecord>& docs, const ReduceOptions& options = {});

/// True when any two spans share a code point.
bool has_overlap(std::vector<EntitySpan> spans);

/// Tokens are runs of word characters and single punctuation marks, also
/// split at span boundaries. Throws OverlapError for overlapping spans and
/// RangeError for spans that are empty, out of bounds or whitespace-edged.
std::vector<TaggedToken> to_bio(std::string_view text, const std::vector<EntitySpan>& spans);

std::vector<EntitySpan> from_bio(const std::vector<TaggedToken>& tokens);

bool is_valid_bio(const std::vector<TaggedToken>& tokens);

/// CoNLL-style columns: token char_start char_end tag. Blank line between
/// lines of the source text, -DOCSTART- before each document.
void write_conll(std::ostream& out, const std::vector<NerDocument>& docs);

/// Entities of a document as metric inputs.
std::vector<EntityPrediction> to_entities(const NerDocument& doc);

}  // namespace ie
