#include "ie/prompting.hpp"

#include <cmath>

#include "ie/errors.hpp"
#include "ie/text.hpp"

namespace ie {

std::set<std::string> QuestionUnit::clues() const {
  std::set<std::string> out;
  for (const auto* f : members) out.insert(f->clue);
  return out;
}

std::size_t PromptOptions::effective_budget() const {
  auto b = static_cast<std::size_t>(std::floor(static_cast<double>(budget) * safety_factor));
  return b == 0 ? 1 : b;
}

std::vector<QuestionUnit> question_units(const DocumentTypeSchema& schema, const AnswerFormat& requested) {
  std::vector<QuestionUnit> units;
  for (const auto& field : schema.fields) {
    if (requested.compound && schema.group_of(field.name)) continue;
    QuestionUnit u;
    u.name = field.name;
    u.members = {&field};
    u.format = {false, requested.sent && field.use_sent_ids, requested.raw && field.use_raw_text};
    u.question = question_for(field, u.format.raw);
    units.push_back(std::move(u));
  }
  if (requested.compound) {
    for (const auto& group : schema.compound_groups) {
      QuestionUnit u;
      u.name = group.name;
      u.is_group = true;
      for (const auto& m : group.members) u.members.push_back(schema.find_field(m));
      u.format = {true, requested.sent && group.use_sent_ids, requested.raw && group.use_raw_text};
      u.question = question_for(group, u.format.raw);
      units.push_back(std::move(u));
    }
  }
  return units;
}

std::vector<PromptInstance> build_prompts(const SegmentedDocument& doc,
                                          const std::vector<QuestionUnit>& units,
                                          const PromptOptions& options,
                                          const TokenCounter& counter,
                                          std::vector<std::string>* warnings) {
  std::vector<PromptInstance> out;
  for (const auto& unit : units) {
    auto windows = build_windows(doc, unit.question, options.effective_budget(), counter, unit.format.sent,
                                 options.oversize, warnings);
    for (auto& w : windows) {
      PromptInstance p;
      p.doc_id = doc.doc_id();
      p.unit = unit.name;
      p.window_index = w.window_index;
      p.range = w.range;
      p.question = unit.question;
      p.context = std::move(w.rendered_context);
      p.format = unit.format;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<PromptInstance> build_prompts(const SegmentedDocument& doc,
                                          const DocumentTypeSchema& schema,
                                          const PromptOptions& options,
                                          const TokenCounter& counter,
                                          std::vector<std::string>* warnings) {
  return build_prompts(doc, question_units(schema, options.requested), options, counter, warnings);
}

int evidence_sentence(const GoldAnnotation& a, const SegmentedDocument& doc) {
  if (a.sent_id) {
    if (*a.sent_id < 1 || *a.sent_id > doc.sentence_count())
      throw AnnotationError("document '" + doc.doc_id() + "', field '" + a.field + "': sent_id " +
                            std::to_string(*a.sent_id) + " out of range");
    return *a.sent_id;
  }
  if (a.raw) {
    if (int id = doc.sentence_at(a.raw->char_start)) return id;
    throw AnnotationError("document '" + doc.doc_id() + "', field '" + a.field + "': raw span is outside every sentence");
  }
  for (const auto& s : doc.sentences())
    if (!a.value_canonical.empty() && s.text.find(a.value_canonical) != std::string::npos) return s.sent_id;
  throw AnnotationError("document '" + doc.doc_id() + "', field '" + a.field +
                        "': no sent_id, raw span, or verbatim value to locate the evidence");
}

TrainingTarget build_training_target(const PromptInstance& instance,
                                     const QuestionUnit& unit,
                                     const AnnotationSet& gold,
                                     const SegmentedDocument& doc) {
  TrainingTarget target;
  AnswerRecord record;
  for (const auto* field : unit.members) {
    const GoldAnnotation* annotation = nullptr;
    for (const auto& a : gold) {
      if (a.field != field->name) continue;
      if (annotation)
        throw AnnotationError("document '" + doc.doc_id() + "': field '" + field->name + "' annotated more than once");
      annotation = &a;
    }
    if (!annotation) continue;
    ++target.annotated;
    int sent = evidence_sentence(*annotation, doc);
    if (unit.format.raw && !annotation->raw)
      throw AnnotationError("document '" + doc.doc_id() + "', field '" + field->name +
                            "': raw text required by the format but not annotated");
    if (!instance.range.contains(sent)) continue;
    ++target.contained;

    AnswerItem item;
    item.clue = field->clue;
    item.value = text::collapse_whitespace(annotation->value_canonical);
    if (unit.format.sent) item.sent_id = sent;
    if (unit.format.raw) item.raw_text = text::collapse_whitespace(annotation->raw->text);
    record.items.push_back(std::move(item));
  }
  if (record.items.empty()) {
    target.text = std::string(kNotAvailable);
    return target;
  }
  try {
    target.text = encode(record, unit.format);
  } catch (const VariantMismatch& e) {
    throw AnnotationError("document '" + doc.doc_id() + "', unit '" + unit.name + "': " + e.what());
  }
  return target;
}

}  // namespace ie
