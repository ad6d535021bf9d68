#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ie {

struct MatchOptions {
  bool case_fold = true;
};

/// Trim, collapse whitespace and (optionally) case-fold.
std::string normalize_answer(std::string_view s, const MatchOptions& options = {});

int exact_match(std::string_view pred, std::string_view gold, const MatchOptions& options = {});

/// Bag-of-tokens F1 over whitespace tokens of the normalized strings.
/// Both empty -> 1, exactly one empty -> 0.
double token_f1(std::string_view pred, std::string_view gold, const MatchOptions& options = {});

struct EntityPrediction {
  std::string doc_id;
  std::string label;
  std::size_t char_start = 0;
  std::size_t char_end = 0;

  bool operator==(const EntityPrediction&) const = default;
  auto operator<=>(const EntityPrediction&) const = default;
};

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
};

/// Entity-level exact match, one-to-one, micro-averaged.
/// Throws OverlapError when gold entities of one document overlap.
PRF entity_prf(const std::vector<EntityPrediction>& preds, const std::vector<EntityPrediction>& golds);

struct FieldScore {
  std::string dataset;
  std::string doc_id;
  std::string field;
  int em = 0;
  double f1 = 0.0;
};

/// Aggregates in percent. Field rows average over documents; dataset rows
/// macro-average their fields (and report the instance-level micro mean);
/// the overall row averages the datasets.
struct CorpusReport {
  struct FieldRow {
    std::string dataset, field;
    std::size_t count = 0;
    double em = 0, f1 = 0;
  };
  struct DatasetRow {
    std::string dataset;
    std::size_t fields = 0, instances = 0;
    double em = 0, f1 = 0;              // macro over fields
    double micro_em = 0, micro_f1 = 0;  // over instances
  };
  std::vector<FieldRow> fields;
  std::vector<DatasetRow> datasets;  // in first-seen order
  double avg_em = 0, avg_f1 = 0;
  double micro_em = 0, micro_f1 = 0;

  const DatasetRow* dataset(std::string_view name) const;
  nlohmann::json to_json() const;
};

CorpusReport corpus_report(const std::vector<FieldScore>& scores);

/// Round half away from zero on the 12-significant-digit decimal form, so
/// binary noise such as 89.34999999999999 does not flip the last digit.
double round_decimal(double value, int digits);

}  // namespace ie
