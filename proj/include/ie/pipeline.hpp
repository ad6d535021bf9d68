#pragma once

// Corpus-level commands shared by the CLI and the tests.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ie/aggregation.hpp"
#include "ie/document.hpp"
#include "ie/metrics.hpp"
#include "ie/model_backend.hpp"
#include "ie/prompting.hpp"
#include "ie/schema.hpp"
#include "ie/token_counter.hpp"

namespace ie {

struct GenerationOptions {
  int num_beams = 5;
  int max_new_tokens = 256;
};

struct DocumentFailure {
  std::string doc_id;
  std::string message;
};

/// One training example per prompt. Documents that cannot be prepared are
/// reported and skipped.
struct PrepareResult {
  std::vector<nlohmann::json> rows;  // {doc_id, field, window, question, context, target}
  std::vector<DocumentFailure> failures;
};
PrepareResult run_prepare(const std::vector<DocumentRecord>& docs,
                          const std::vector<DocumentTypeSchema>& schemas,
                          const PromptOptions& options,
                          const TokenCounter& counter);

/// All questions of one document go to the backend in a single request.
std::vector<Extraction> extract_document(const DocumentRecord& record,
                                         const std::vector<DocumentTypeSchema>& schemas,
                                         const PromptOptions& options,
                                         const GenerationOptions& generation,
                                         Backend& backend,
                                         const TokenCounter& counter,
                                         std::vector<std::string>* warnings = nullptr);

struct ExtractResult {
  std::vector<Extraction> extractions;  // sorted by doc_id, then field
  std::vector<DocumentFailure> failures;
  std::vector<std::string> warnings;
  /// 0 success, 1 hard failure (no document succeeded), 2 partial.
  int exit_code() const;
  std::size_t documents = 0;
};
ExtractResult run_extract(const std::vector<DocumentRecord>& docs,
                          const std::vector<DocumentTypeSchema>& schemas,
                          const PromptOptions& options,
                          const GenerationOptions& generation,
                          Backend& backend,
                          const TokenCounter& counter,
                          std::size_t workers = 1);

struct EvaluationResult {
  CorpusReport report;
  std::vector<FieldScore> scores;
  std::vector<std::string> missing_predictions;  // gold documents with no prediction at all
  std::vector<std::string> unknown_predictions;  // predicted documents absent from gold

  nlohmann::json to_json() const;
};

/// Scores every (document, field) pair. Fields come from the schema when one
/// is given, else from the union of gold and predicted fields; an absent value
/// counts as the empty string. The dataset of a document is its doc_type.
EvaluationResult run_evaluate(const std::vector<Extraction>& predictions,
                              const std::vector<DocumentRecord>& gold,
                              const std::vector<DocumentTypeSchema>* schemas = nullptr,
                              const MatchOptions& match = {});

/// Self-contained static HTML report.
void write_audit_html(std::ostream& out, const std::vector<Extraction>& predictions, const std::vector<DocumentRecord>& docs);

std::string html_escape(std::string_view s);

}  // namespace ie
