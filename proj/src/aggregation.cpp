#include "ie/aggregation.hpp"

#include <algorithm>
#include <cmath>

#include "ie/errors.hpp"
#include "ie/normalization.hpp"

namespace ie {

bool WindowAnswer::is_na() const {
  const auto* record = std::get_if<AnswerRecord>(&parsed);
  return record && record->is_na;
}

std::string_view to_string(ExtractionStatus s) {
  switch (s) {
    case ExtractionStatus::extracted: return "extracted";
    case ExtractionStatus::empty: return "empty";
    case ExtractionStatus::malformed_all: return "malformed_all";
  }
  return "empty";
}

std::optional<ExtractionStatus> extraction_status_from_string(std::string_view s) {
  for (auto st : {ExtractionStatus::extracted, ExtractionStatus::empty, ExtractionStatus::malformed_all})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

Selection aggregate(const std::vector<WindowAnswer>& answers) {
  if (answers.empty()) throw RangeError("aggregate: no window answers");
  Selection sel;
  bool any_malformed = false;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const auto& a = answers[i];
    if (!std::isfinite(a.score)) throw RangeError("aggregate: non-finite score for window " + std::to_string(a.window_index));
    if (a.is_malformed()) {
      any_malformed = true;
      continue;
    }
    if (a.is_na()) continue;
    if (!sel.index) {
      sel.index = i;
      continue;
    }
    const auto& best = answers[*sel.index];
    if (a.score > best.score || (a.score == best.score && a.window_index < best.window_index)) sel.index = i;
  }
  if (sel.index)
    sel.status = ExtractionStatus::extracted;
  else
    sel.status = any_malformed ? ExtractionStatus::malformed_all : ExtractionStatus::empty;
  return sel;
}

std::vector<Extraction> finalize(const std::vector<WindowAnswer>& answers,
                                 const Selection& selection,
                                 const QuestionUnit& unit,
                                 const SegmentedDocument& doc,
                                 const AlignOptions& align) {
  std::vector<Extraction> out;
  auto blank = [&](const FieldSchema& f, ExtractionStatus status) {
    Extraction e;
    e.doc_id = doc.doc_id();
    e.field = f.name;
    e.status = status;
    return e;
  };

  if (!selection.index) {
    // Keep the best-scoring malformed output so audits can show what the model said.
    const WindowAnswer* best_malformed = nullptr;
    for (const auto& a : answers)
      if (a.is_malformed() && (!best_malformed || a.score > best_malformed->score)) best_malformed = &a;
    for (const auto* f : unit.members) {
      auto e = blank(*f, selection.status);
      if (selection.status == ExtractionStatus::malformed_all && best_malformed) {
        e.raw_output = best_malformed->raw_output;
        const auto& m = std::get<MalformedAnswer>(best_malformed->parsed);
        e.notes.push_back("malformed output in window " + std::to_string(best_malformed->window_index) + " at " +
                          std::to_string(m.position) + ": " + m.reason);
      }
      out.push_back(std::move(e));
    }
    return out;
  }

  const WindowAnswer& chosen = answers.at(*selection.index);
  const auto& record = std::get<AnswerRecord>(chosen.parsed);
  const auto split = split_compound(record, unit.members);

  for (const auto* f : unit.members) {
    auto it = split.by_field.find(f->name);
    if (it == split.by_field.end()) {
      out.push_back(blank(*f, ExtractionStatus::empty));
      continue;
    }
    const AnswerItem& item = it->second;
    Extraction e = blank(*f, ExtractionStatus::extracted);
    e.value = item.value;
    e.sent_id = item.sent_id;
    e.raw_text = item.raw_text;
    e.score = chosen.score;
    e.window_index = chosen.window_index;
    if (std::find(split.duplicates.begin(), split.duplicates.end(), f->name) != split.duplicates.end())
      e.notes.push_back("clue '" + f->clue + "' repeated; first occurrence kept");
    if (!validate(item.value, f->canonical_type, f->categories))
      e.notes.push_back("value does not match the " + std::string(to_string(f->canonical_type)) + " canonical syntax");
    if (item.sent_id) {
      try {
        e.source_span = locate(item, doc, align);
      } catch (const Error& err) {
        e.notes.push_back(std::string("alignment: ") + err.what());
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace ie
