#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ie {

/// Verbatim evidence for an annotation; offsets are code points into the document text.
struct RawSpan {
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;

  bool operator==(const RawSpan&) const = default;
};

struct GoldAnnotation {
  std::string field;
  std::string value_canonical;
  std::optional<RawSpan> raw;
  std::optional<int> sent_id;

  bool operator==(const GoldAnnotation&) const = default;
};

using AnnotationSet = std::vector<GoldAnnotation>;

struct DocumentRecord {
  std::string doc_id;
  std::string doc_type;
  std::string text;
  AnnotationSet annotations;

  bool operator==(const DocumentRecord&) const = default;
};

}  // namespace ie
