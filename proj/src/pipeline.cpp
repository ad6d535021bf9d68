#include "ie/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>
#include <tuple>

#include "ie/errors.hpp"
#include "ie/segmentation.hpp"

namespace ie {

using nlohmann::json;

namespace {

const DocumentTypeSchema& schema_for(const DocumentRecord& record, const std::vector<DocumentTypeSchema>& schemas) {
  const auto* schema = find_doc_type(schemas, record.doc_type);
  if (!schema) throw SchemaError("unknown doc_type '" + record.doc_type + "'");
  return *schema;
}

}  // namespace

PrepareResult run_prepare(const std::vector<DocumentRecord>& docs,
                          const std::vector<DocumentTypeSchema>& schemas,
                          const PromptOptions& options,
                          const TokenCounter& counter) {
  PrepareResult result;
  for (const auto& record : docs) {
    try {
      const auto& schema = schema_for(record, schemas);
      const auto doc = segment(record.doc_id, record.text);
      std::vector<json> rows;
      for (const auto& unit : question_units(schema, options.requested)) {
        for (const auto& p : build_prompts(doc, std::vector<QuestionUnit>{unit}, options, counter)) {
          const auto target = build_training_target(p, unit, record.annotations, doc);
          rows.push_back({{"doc_id", p.doc_id},
                          {"field", p.unit},
                          {"window", p.window_index},
                          {"question", p.question},
                          {"context", p.context},
                          {"target", target.text}});
        }
      }
      for (auto& r : rows) result.rows.push_back(std::move(r));
    } catch (const Error& e) {
      result.failures.push_back({record.doc_id, e.what()});
    }
  }
  return result;
}

std::vector<Extraction> extract_document(const DocumentRecord& record,
                                         const std::vector<DocumentTypeSchema>& schemas,
                                         const PromptOptions& options,
                                         const GenerationOptions& generation,
                                         Backend& backend,
                                         const TokenCounter& counter,
                                         std::vector<std::string>* warnings) {
  const auto& schema = schema_for(record, schemas);
  const auto doc = segment(record.doc_id, record.text);
  const auto units = question_units(schema, options.requested);

  std::vector<std::vector<PromptInstance>> prompts;
  GenerationRequest request;
  request.num_beams = generation.num_beams;
  request.max_new_tokens = generation.max_new_tokens;
  for (const auto& unit : units) {
    prompts.push_back(build_prompts(doc, std::vector<QuestionUnit>{unit}, options, counter, warnings));
    for (const auto& p : prompts.back()) request.items.push_back({p.question, p.context});
  }

  const auto response = backend.generate(request);
  if (response.items.size() != request.items.size())
    throw ProtocolError("backend returned " + std::to_string(response.items.size()) + " answers for " +
                        std::to_string(request.items.size()) + " prompts");

  std::vector<Extraction> out;
  std::size_t k = 0;
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto clues = units[u].clues();
    std::vector<WindowAnswer> answers;
    for (const auto& p : prompts[u]) {
      const auto& generated = response.items[k++];
      answers.push_back({p.window_index, generated.text, generated.score, parse(generated.text, clues, p.format)});
    }
    const auto selection = aggregate(answers);
    for (auto& e : finalize(answers, selection, units[u], doc)) out.push_back(std::move(e));
  }
  return out;
}

int ExtractResult::exit_code() const {
  if (failures.empty()) return 0;
  return failures.size() >= documents ? 1 : 2;
}

ExtractResult run_extract(const std::vector<DocumentRecord>& docs,
                          const std::vector<DocumentTypeSchema>& schemas,
                          const PromptOptions& options,
                          const GenerationOptions& generation,
                          Backend& backend,
                          const TokenCounter& counter,
                          std::size_t workers) {
  struct Slot {
    std::vector<Extraction> rows;
    std::vector<std::string> warnings;
    std::optional<std::string> error;
  };
  std::vector<Slot> slots(docs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < docs.size();) {
      try {
        slots[i].rows = extract_document(docs[i], schemas, options, generation, backend, counter, &slots[i].warnings);
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(docs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  ExtractResult result;
  result.documents = docs.size();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (auto& w : slots[i].warnings) result.warnings.push_back(docs[i].doc_id + ": " + w);
    if (slots[i].error) {
      result.failures.push_back({docs[i].doc_id, *slots[i].error});
      continue;
    }
    for (auto& e : slots[i].rows) result.extractions.push_back(std::move(e));
  }
  std::stable_sort(result.extractions.begin(), result.extractions.end(),
                   [](const auto& a, const auto& b) { return std::tie(a.doc_id, a.field) < std::tie(b.doc_id, b.field); });
  return result;
}

json EvaluationResult::to_json() const {
  json j = report.to_json();
  j["missing_predictions"] = missing_predictions;
  j["unknown_predictions"] = unknown_predictions;
  return j;
}

EvaluationResult run_evaluate(const std::vector<Extraction>& predictions,
                              const std::vector<DocumentRecord>& gold,
                              const std::vector<DocumentTypeSchema>* schemas,
                              const MatchOptions& match) {
  std::map<std::string, std::map<std::string, std::string>> predicted;
  for (const auto& e : predictions) {
    auto& fields = predicted[e.doc_id];
    if (!fields.contains(e.field)) fields[e.field] = e.value.value_or("");
  }

  EvaluationResult result;
  std::set<std::string> gold_ids;
  for (const auto& doc : gold) {
    gold_ids.insert(doc.doc_id);
    std::map<std::string, std::string> expected;
    for (const auto& a : doc.annotations) expected.try_emplace(a.field, a.value_canonical);

    auto it = predicted.find(doc.doc_id);
    if (it == predicted.end()) result.missing_predictions.push_back(doc.doc_id);
    static const std::map<std::string, std::string> none;
    const auto& got = it == predicted.end() ? none : it->second;

    std::vector<std::string> fields;
    const DocumentTypeSchema* schema = schemas ? find_doc_type(*schemas, doc.doc_type) : nullptr;
    if (schema) {
      for (const auto& f : schema->fields) fields.push_back(f.name);
    } else {
      std::set<std::string> all;
      for (const auto& [f, v] : expected) all.insert(f);
      for (const auto& [f, v] : got) all.insert(f);
      fields.assign(all.begin(), all.end());
    }
    for (const auto& f : fields) {
      auto g = expected.contains(f) ? expected.at(f) : std::string();
      auto p = got.contains(f) ? got.at(f) : std::string();
      result.scores.push_back({doc.doc_type, doc.doc_id, f, exact_match(p, g, match), token_f1(p, g, match)});
    }
  }
  for (const auto& [id, fields] : predicted)
    if (!gold_ids.contains(id)) result.unknown_predictions.push_back(id);
  result.report = corpus_report(result.scores);
  return result;
}

std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_audit_html(std::ostream& out, const std::vector<Extraction>& predictions, const std::vector<DocumentRecord>& docs) {
  std::map<std::string, std::vector<const Extraction*>> by_doc;
  for (const auto& e : predictions) by_doc[e.doc_id].push_back(&e);

  out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Extraction audit</title>\n<style>\n"
         "body{font-family:sans-serif;margin:2em}table{border-collapse:collapse;margin-bottom:2em}"
         "td,th{border:1px solid #ccc;padding:4px 8px;vertical-align:top}mark{background:#ffe066}"
         ".flag{color:#b00;font-weight:bold}.muted{color:#888}\n</style></head><body>\n<h1>Extraction audit</h1>\n";
  for (const auto& record : docs) {
    out << "<h2>" << html_escape(record.doc_id) << " <span class=\"muted\">(" << html_escape(record.doc_type)
        << ")</span></h2>\n";
    auto it = by_doc.find(record.doc_id);
    if (it == by_doc.end()) {
      out << "<p class=\"flag\">no predictions</p>\n";
      continue;
    }
    std::optional<SegmentedDocument> doc;
    try {
      doc = segment(record.doc_id, record.text);
    } catch (const Error& e) {
      out << "<p class=\"flag\">" << html_escape(e.what()) << "</p>\n";
    }
    out << "<table><tr><th>field</th><th>status</th><th>value</th><th>score</th><th>window</th><th>flags</th>"
           "<th>evidence</th></tr>\n";
    for (const auto* e : it->second) {
      std::vector<std::string> flags;
      if (e->status == ExtractionStatus::malformed_all) flags.push_back("malformed");
      if (e->source_span && e->source_span->ambiguous) flags.push_back("ambiguous");
      if (e->source_span && e->source_span->sentence_level) flags.push_back("sentence-level");
      if (!e->notes.empty()) flags.push_back("notes");

      out << "<tr><td>" << html_escape(e->field) << "</td><td>" << to_string(e->status) << "</td><td>"
          << html_escape(e->value.value_or("")) << "</td><td>";
      if (e->score) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", *e->score);
        out << buf;
      }
      out << "</td><td>" << (e->window_index ? std::to_string(*e->window_index) : "") << "</td><td class=\"flag\">";
      for (std::size_t i = 0; i < flags.size(); ++i) out << (i ? ", " : "") << flags[i];
      out << "</td><td>";
      if (doc && e->source_span) {
        const auto& span = *e->source_span;
        try {
          const auto& s = doc->sentence(span.sent_id);
          const auto start = std::clamp(span.char_start, s.char_start, s.char_end);
          const auto end = std::clamp(span.char_end, start, s.char_end);
          out << "[SENT" << s.sent_id << "] " << html_escape(doc->substr(s.char_start, start)) << "<mark>"
              << html_escape(doc->substr(start, end)) << "</mark>" << html_escape(doc->substr(end, s.char_end));
        } catch (const Error&) {
          out << "<span class=\"flag\">span outside the document</span>";
        }
      }
      for (const auto& n : e->notes) out << "<div class=\"muted\">" << html_escape(n) << "</div>";
      if (e->raw_output) out << "<div>model output: <code>" << html_escape(*e->raw_output) << "</code></div>";
      out << "</td></tr>\n";
    }
    out << "</table>\n";
  }
  out << "</body></html>\n";
}

}  // namespace ie
