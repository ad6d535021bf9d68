#include "ie/ner_export.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <map>
#include <ostream>

#include "ie/errors.hpp"
#include "ie/text.hpp"

namespace ie {

namespace {

bool is_ws(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' || c == 0xA0 ||
         (c >= 0x2000 && c <= 0x200B) || c == 0x3000;
}

bool is_punct(char32_t c) { return c < 0x80 && std::ispunct(static_cast<int>(c)); }

bool overlaps(const EntitySpan& a, const EntitySpan& b) { return a.char_start < b.char_end && b.char_start < a.char_end; }

}  // namespace

double ReductionReport::document_retention() const {
  return documents_in ? static_cast<double>(documents_out) / static_cast<double>(documents_in) : 1.0;
}

nlohmann::json ReductionReport::to_json() const {
  return {{"documents_in", documents_in},
          {"documents_out", documents_out},
          {"document_retention", document_retention()},
          {"fields_in", fields_in},
          {"fields_out", fields_out},
          {"classification_fields", classification_fields},
          {"overlapping_fields", overlapping_fields},
          {"removed_documents", removed_documents}};
}

bool has_overlap(std::vector<EntitySpan> spans) {
  std::sort(spans.begin(), spans.end(),
            [](const auto& a, const auto& b) { return a.char_start < b.char_start; });
  std::size_t reach = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (i > 0 && spans[i].char_start < reach) return true;
    reach = std::max(reach, spans[i].char_end);
  }
  return false;
}

ReducedCorpus reduce_corpus(const std::vector<DocumentRecord>& docs, const ReduceOptions& options) {
  ReducedCorpus out;
  auto& report = out.report;
  report.documents_in = docs.size();

  std::set<std::string> all_fields, span_fields;
  std::vector<NerDocument> candidates;
  for (const auto& d : docs) {
    NerDocument nd{d.doc_id, d.text, {}};
    for (const auto& a : d.annotations) {
      all_fields.insert(a.field);
      if (!a.raw || a.raw->char_end <= a.raw->char_start) continue;
      span_fields.insert(a.field);
      nd.spans.push_back({a.field, a.raw->char_start, a.raw->char_end});
    }
    candidates.push_back(std::move(nd));
  }
  report.fields_in = all_fields.size();
  std::set_difference(all_fields.begin(), all_fields.end(), span_fields.begin(), span_fields.end(),
                      std::inserter(report.classification_fields, report.classification_fields.end()));

  // Documents in which each class overlaps some other class.
  std::map<std::string, std::size_t> overlap_docs;
  for (const auto& d : candidates) {
    std::set<std::string> hit;
    for (std::size_t i = 0; i < d.spans.size(); ++i)
      for (std::size_t j = i + 1; j < d.spans.size(); ++j)
        if (d.spans[i].label != d.spans[j].label && overlaps(d.spans[i], d.spans[j])) {
          hit.insert(d.spans[i].label);
          hit.insert(d.spans[j].label);
        }
    for (const auto& label : hit) ++overlap_docs[label];
  }
  const double n = docs.empty() ? 1.0 : static_cast<double>(docs.size());
  for (const auto& [label, count] : overlap_docs)
    if (static_cast<double>(count) / n > options.overlap_fraction) report.overlapping_fields.insert(label);

  std::set<std::string> kept_fields;
  for (auto& d : candidates) {
    std::erase_if(d.spans, [&](const EntitySpan& s) { return report.overlapping_fields.contains(s.label); });
    if (has_overlap(d.spans)) {
      report.removed_documents.push_back(d.doc_id);
      continue;
    }
    for (const auto& s : d.spans) kept_fields.insert(s.label);
    std::sort(d.spans.begin(), d.spans.end(), [](const auto& a, const auto& b) { return a.char_start < b.char_start; });
    out.documents.push_back(std::move(d));
  }
  report.documents_out = out.documents.size();
  report.fields_out = kept_fields.size();
  return out;
}

std::vector<TaggedToken> to_bio(std::string_view text_utf8, const std::vector<EntitySpan>& spans) {
  const auto cps = text::decode(text_utf8);
  auto sorted = spans;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.char_start < b.char_start; });
  for (const auto& s : sorted) {
    if (s.char_start >= s.char_end || s.char_end > cps.size())
      throw RangeError("entity '" + s.label + "' has an empty or out-of-bounds span");
    if (is_ws(cps[s.char_start]) || is_ws(cps[s.char_end - 1]))
      throw RangeError("entity '" + s.label + "' span starts or ends with whitespace");
  }
  if (has_overlap(sorted)) throw OverlapError("overlapping entity spans");

  std::vector<bool> boundary(cps.size() + 1, false);
  for (const auto& s : sorted) boundary[s.char_start] = boundary[s.char_end] = true;

  std::vector<TaggedToken> tokens;
  std::size_t next_span = 0;
  for (std::size_t i = 0; i < cps.size();) {
    if (is_ws(cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (!is_punct(cps[i]))
      while (j < cps.size() && !is_ws(cps[j]) && !is_punct(cps[j]) && !boundary[j]) ++j;

    TaggedToken t{text::encode(std::u32string_view(cps).substr(i, j - i)), i, j, "O"};
    while (next_span < sorted.size() && sorted[next_span].char_end <= i) ++next_span;
    if (next_span < sorted.size() && sorted[next_span].char_start <= i)
      t.tag = (sorted[next_span].char_start == i ? "B-" : "I-") + sorted[next_span].label;
    tokens.push_back(std::move(t));
    i = j;
  }
  return tokens;
}

std::vector<EntitySpan> from_bio(const std::vector<TaggedToken>& tokens) {
  std::vector<EntitySpan> spans;
  bool open = false;
  for (const auto& t : tokens) {
    if (t.tag == "O") {
      open = false;
      continue;
    }
    const bool begin = t.tag.starts_with("B-");
    const std::string label = t.tag.substr(2);
    if (begin || !open || spans.back().label != label) {
      spans.push_back({label, t.char_start, t.char_end});
      open = true;
    } else {
      spans.back().char_end = t.char_end;
    }
  }
  return spans;
}

bool is_valid_bio(const std::vector<TaggedToken>& tokens) {
  std::string current;
  for (const auto& t : tokens) {
    if (t.tag == "O") {
      current.clear();
    } else if (t.tag.starts_with("B-") && t.tag.size() > 2) {
      current = t.tag.substr(2);
    } else if (t.tag.starts_with("I-") && t.tag.size() > 2) {
      if (current != t.tag.substr(2)) return false;
    } else {
      return false;
    }
  }
  return true;
}

void write_conll(std::ostream& out, const std::vector<NerDocument>& docs) {
  for (const auto& d : docs) {
    out << "-DOCSTART- -X- -X- O\n\n";
    const auto cps = text::decode(d.text);
    const auto tokens = to_bio(d.text, d.spans);
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      if (k > 0) {
        bool line_break = false;
        for (std::size_t c = tokens[k - 1].char_end; c < tokens[k].char_start; ++c)
          line_break = line_break || cps[c] == U'\n' || cps[c] == U'\r';
        if (line_break) out << '\n';
      }
      const auto& t = tokens[k];
      out << t.text << ' ' << t.char_start << ' ' << t.char_end << ' ' << t.tag << '\n';
    }
    if (!tokens.empty()) out << '\n';
  }
}

std::vector<EntityPrediction> to_entities(const NerDocument& doc) {
  std::vector<EntityPrediction> out;
  for (const auto& s : doc.spans) out.push_back({doc.doc_id, s.label, s.char_start, s.char_end});
  return out;
}

}  // namespace ie
