#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ie/alignment.hpp"
#include "ie/answer_codec.hpp"
#include "ie/prompting.hpp"

namespace ie {

/// Model output for one (document, question, window).
struct WindowAnswer {
  int window_index = 0;
  std::string raw_output;
  double score = 0.0;  // log-probability, higher is better
  ParsedAnswer parsed;

  bool is_malformed() const { return std::holds_alternative<MalformedAnswer>(parsed); }
  bool is_na() const;
};

enum class ExtractionStatus { extracted, empty, malformed_all };

std::string_view to_string(ExtractionStatus s);
std::optional<ExtractionStatus> extraction_status_from_string(std::string_view s);

struct Selection {
  std::optional<std::size_t> index;  // into the aggregated answers
  ExtractionStatus status = ExtractionStatus::empty;
};

/// Best well-formed non-N/A answer by score, earliest window on ties.
/// Throws RangeError on an empty list or a non-finite score.
Selection aggregate(const std::vector<WindowAnswer>& answers);

struct Extraction {
  std::string doc_id;
  std::string field;
  std::optional<std::string> value;
  std::optional<int> sent_id;
  std::optional<std::string> raw_text;
  std::optional<SourceSpan> source_span;
  std::optional<double> score;
  std::optional<int> window_index;
  ExtractionStatus status = ExtractionStatus::empty;
  std::vector<std::string> notes;   // alignment failures, duplicate clues, lint findings
  std::optional<std::string> raw_output;  // model text kept for malformed_all audits

  bool operator==(const Extraction&) const = default;
};

/// One Extraction per member field of the unit. Alignment problems are
/// recorded in notes, never thrown.
std::vector<Extraction> finalize(const std::vector<WindowAnswer>& answers,
                                 const Selection& selection,
                                 const QuestionUnit& unit,
                                 const SegmentedDocument& doc,
                                 const AlignOptions& align = {});

}  // namespace ie
