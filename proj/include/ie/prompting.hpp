#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ie/answer_codec.hpp"
#include "ie/document.hpp"
#include "ie/schema.hpp"
#include "ie/segmentation.hpp"

namespace ie {

/// One question asked of every window: a standalone field or a compound group.
struct QuestionUnit {
  std::string name;  // field or group name
  bool is_group = false;
  std::vector<const FieldSchema*> members;  // one entry for a standalone field
  std::string question;
  AnswerFormat format;

  std::set<std::string> clues() const;
};

struct PromptOptions {
  AnswerFormat requested;  // features switched on for this run
  std::size_t budget = 512;
  double safety_factor = 0.8;  // applied to budget before windowing
  OversizePolicy oversize = OversizePolicy::truncate;

  std::size_t effective_budget() const;
};

/// Units for a schema: groups replace their members when compound is
/// requested; sent/raw apply where both the run and the schema allow them.
std::vector<QuestionUnit> question_units(const DocumentTypeSchema& schema, const AnswerFormat& requested);

struct PromptInstance {
  std::string doc_id;
  std::string unit;  // field or group name
  int window_index = 0;
  SentenceRange range;
  std::string question;
  std::string context;
  AnswerFormat format;
  std::optional<std::string> target_answer;
};

std::vector<PromptInstance> build_prompts(const SegmentedDocument& doc,
                                          const std::vector<QuestionUnit>& units,
                                          const PromptOptions& options,
                                          const TokenCounter& counter,
                                          std::vector<std::string>* warnings = nullptr);

/// Convenience: units from `schema` with options.requested.
std::vector<PromptInstance> build_prompts(const SegmentedDocument& doc,
                                          const DocumentTypeSchema& schema,
                                          const PromptOptions& options,
                                          const TokenCounter& counter,
                                          std::vector<std::string>* warnings = nullptr);

struct TrainingTarget {
  std::string text;             // encoded answer or "N/A"
  std::size_t contained = 0;    // annotated members whose evidence lies in the window
  std::size_t annotated = 0;    // annotated members overall
};

/// Evidence sentence of an annotation: its sent_id, else the sentence holding
/// its raw span, else the first sentence containing the canonical value.
/// Throws AnnotationError when none applies.
int evidence_sentence(const GoldAnnotation& annotation, const SegmentedDocument& doc);

/// Gold answer for one prompt; "N/A" when no annotated member has evidence
/// in the window. Throws AnnotationError when a required raw span is missing.
TrainingTarget build_training_target(const PromptInstance& instance,
                                     const QuestionUnit& unit,
                                     const AnnotationSet& gold,
                                     const SegmentedDocument& doc);

}  // namespace ie
