#include "ie/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "ie/errors.hpp"
#include "ie/text.hpp"

namespace ie {

namespace {

std::vector<std::string> tokens_of(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

}  // namespace

std::string normalize_answer(std::string_view s, const MatchOptions& options) {
  auto out = text::collapse_whitespace(s);
  return options.case_fold ? text::fold_case(out) : out;
}

int exact_match(std::string_view pred, std::string_view gold, const MatchOptions& options) {
  return normalize_answer(pred, options) == normalize_answer(gold, options) ? 1 : 0;
}

double token_f1(std::string_view pred, std::string_view gold, const MatchOptions& options) {
  const auto p = tokens_of(normalize_answer(pred, options));
  const auto g = tokens_of(normalize_answer(gold, options));
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;

  std::map<std::string, std::size_t> gold_counts;
  for (const auto& t : g) ++gold_counts[t];
  std::size_t common = 0;
  for (const auto& t : p) {
    auto it = gold_counts.find(t);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(p.size());
  const double recall = static_cast<double>(common) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

PRF entity_prf(const std::vector<EntityPrediction>& preds, const std::vector<EntityPrediction>& golds) {
  auto sorted = golds;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::tie(a.doc_id, a.char_start, a.char_end) < std::tie(b.doc_id, b.char_start, b.char_end);
  });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].doc_id == sorted[i - 1].doc_id && sorted[i].char_start < sorted[i - 1].char_end)
      throw OverlapError("overlapping gold entities in document '" + sorted[i].doc_id + "'");

  std::map<EntityPrediction, std::size_t> unmatched;
  for (const auto& g : golds) ++unmatched[g];
  PRF r;
  r.predicted = preds.size();
  r.gold = golds.size();
  for (const auto& p : preds) {
    auto it = unmatched.find(p);
    if (it != unmatched.end() && it->second > 0) {
      --it->second;
      ++r.true_positives;
    }
  }
  if (r.predicted == 0 && r.gold == 0) {
    r.precision = r.recall = r.f1 = 1.0;
    return r;
  }
  r.precision = r.predicted ? static_cast<double>(r.true_positives) / static_cast<double>(r.predicted) : 0.0;
  r.recall = r.gold ? static_cast<double>(r.true_positives) / static_cast<double>(r.gold) : 0.0;
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

double round_decimal(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value * scale);
  return std::round(std::strtod(buf, nullptr)) / scale;
}

const CorpusReport::DatasetRow* CorpusReport::dataset(std::string_view name) const {
  for (const auto& d : datasets)
    if (d.dataset == name) return &d;
  return nullptr;
}

CorpusReport corpus_report(const std::vector<FieldScore>& scores) {
  struct Acc {
    std::size_t n = 0;
    double em = 0, f1 = 0;
  };
  std::vector<std::pair<std::string, std::string>> field_order;
  std::map<std::pair<std::string, std::string>, Acc> per_field;
  std::vector<std::string> dataset_order;
  std::map<std::string, Acc> per_dataset_micro;

  for (const auto& s : scores) {
    auto key = std::make_pair(s.dataset, s.field);
    if (!per_field.contains(key)) field_order.push_back(key);
    if (!per_dataset_micro.contains(s.dataset)) dataset_order.push_back(s.dataset);
    auto& f = per_field[key];
    ++f.n;
    f.em += s.em;
    f.f1 += s.f1;
    auto& d = per_dataset_micro[s.dataset];
    ++d.n;
    d.em += s.em;
    d.f1 += s.f1;
  }

  CorpusReport report;
  std::map<std::string, Acc> per_dataset_macro;
  for (const auto& key : field_order) {
    const auto& acc = per_field[key];
    CorpusReport::FieldRow row{key.first, key.second, acc.n, 100.0 * acc.em / acc.n, 100.0 * acc.f1 / acc.n};
    auto& m = per_dataset_macro[key.first];
    ++m.n;
    m.em += row.em;
    m.f1 += row.f1;
    report.fields.push_back(std::move(row));
  }

  std::size_t total = 0;
  double total_em = 0, total_f1 = 0;
  for (const auto& name : dataset_order) {
    const auto& macro = per_dataset_macro[name];
    const auto& micro = per_dataset_micro[name];
    report.datasets.push_back({name, macro.n, micro.n, macro.em / macro.n, macro.f1 / macro.n,
                               100.0 * micro.em / micro.n, 100.0 * micro.f1 / micro.n});
    report.avg_em += report.datasets.back().em;
    report.avg_f1 += report.datasets.back().f1;
    total += micro.n;
    total_em += micro.em;
    total_f1 += micro.f1;
  }
  if (!report.datasets.empty()) {
    report.avg_em /= static_cast<double>(report.datasets.size());
    report.avg_f1 /= static_cast<double>(report.datasets.size());
    report.micro_em = 100.0 * total_em / static_cast<double>(total);
    report.micro_f1 = 100.0 * total_f1 / static_cast<double>(total);
  }
  return report;
}

nlohmann::json CorpusReport::to_json() const {
  using nlohmann::json;
  auto pct = [](double v) { return round_decimal(v, 1); };
  json j;
  j["fields"] = json::array();
  for (const auto& f : fields)
    j["fields"].push_back({{"dataset", f.dataset}, {"field", f.field}, {"count", f.count}, {"em", pct(f.em)}, {"f1", pct(f.f1)}});
  j["datasets"] = json::array();
  for (const auto& d : datasets)
    j["datasets"].push_back({{"dataset", d.dataset},
                             {"fields", d.fields},
                             {"instances", d.instances},
                             {"em", pct(d.em)},
                             {"f1", pct(d.f1)},
                             {"micro_em", pct(d.micro_em)},
                             {"micro_f1", pct(d.micro_f1)}});
  j["average"] = {{"em", pct(avg_em)}, {"f1", pct(avg_f1)}, {"micro_em", pct(micro_em)}, {"micro_f1", pct(micro_f1)}};
  return j;
}

}  // namespace ie
