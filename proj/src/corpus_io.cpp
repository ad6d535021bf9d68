#include "ie/corpus_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <sstream>

#include "ie/errors.hpp"
#include "ie/text.hpp"

namespace ie {

using nlohmann::json;

namespace {

template <class T>
T required(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string(what) + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string(what) + ": '" + key + "' has the wrong type");
  }
}

template <class T>
std::optional<T> optional_key(const json& j, const char* key, const char* what) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return required<T>(j, key, what);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

json to_json(const DocumentRecord& record) {
  json anns = json::array();
  for (const auto& a : record.annotations) {
    json o{{"field", a.field}, {"value_canonical", a.value_canonical}};
    if (a.raw) o["raw"] = {{"text", a.raw->text}, {"char_start", a.raw->char_start}, {"char_end", a.raw->char_end}};
    if (a.sent_id) o["sent_id"] = *a.sent_id;
    anns.push_back(std::move(o));
  }
  return {{"doc_id", record.doc_id}, {"doc_type", record.doc_type}, {"text", record.text}, {"annotations", anns}};
}

DocumentRecord document_from_json(const json& j) {
  DocumentRecord r;
  r.doc_id = required<std::string>(j, "doc_id", "document");
  const std::string where = "document '" + r.doc_id + "'";
  r.doc_type = required<std::string>(j, "doc_type", where.c_str());
  r.text = required<std::string>(j, "text", where.c_str());
  if (!text::is_valid_utf8(r.text)) throw FormatError(where + ": text is not valid UTF-8");
  if (!j.contains("annotations")) return r;
  if (!j["annotations"].is_array()) throw FormatError(where + ": 'annotations' must be an array");

  const auto starts = text::codepoint_starts(r.text);
  const std::size_t length = starts.size() - 1;
  for (const auto& aj : j["annotations"]) {
    GoldAnnotation a;
    a.field = required<std::string>(aj, "field", where.c_str());
    const std::string at = where + ", field '" + a.field + "'";
    a.value_canonical = required<std::string>(aj, "value_canonical", at.c_str());
    a.sent_id = optional_key<int>(aj, "sent_id", at.c_str());
    if (aj.contains("raw") && !aj["raw"].is_null()) {
      const auto& rj = aj["raw"];
      RawSpan raw{required<std::string>(rj, "text", at.c_str()), required<std::size_t>(rj, "char_start", at.c_str()),
                  required<std::size_t>(rj, "char_end", at.c_str())};
      if (raw.char_start > raw.char_end || raw.char_end > length)
        throw FormatError(at + ": raw span out of bounds");
      std::string_view sub(r.text.data() + starts[raw.char_start], starts[raw.char_end] - starts[raw.char_start]);
      if (sub != raw.text) throw FormatError(at + ": raw text does not match the document at its offsets");
      a.raw = std::move(raw);
    }
    r.annotations.push_back(std::move(a));
  }
  return r;
}

json to_json(const Extraction& e) {
  json o{{"doc_id", e.doc_id}, {"field", e.field}};
  o["value"] = e.value ? json(*e.value) : json(nullptr);
  if (e.sent_id) o["sent_id"] = *e.sent_id;
  if (e.raw_text) o["raw"] = *e.raw_text;
  if (e.source_span)
    o["span"] = {{"sent_id", e.source_span->sent_id},
                 {"char_start", e.source_span->char_start},
                 {"char_end", e.source_span->char_end},
                 {"ambiguous", e.source_span->ambiguous},
                 {"sentence_level", e.source_span->sentence_level}};
  o["score"] = e.score ? json(*e.score) : json(nullptr);
  o["window"] = e.window_index ? json(*e.window_index) : json(nullptr);
  o["status"] = std::string(to_string(e.status));
  if (!e.notes.empty()) o["notes"] = e.notes;
  if (e.raw_output) o["raw_output"] = *e.raw_output;
  return o;
}

Extraction extraction_from_json(const json& j) {
  Extraction e;
  e.doc_id = required<std::string>(j, "doc_id", "extraction");
  e.field = required<std::string>(j, "field", "extraction");
  const std::string where = "extraction '" + e.doc_id + "'/'" + e.field + "'";
  e.value = optional_key<std::string>(j, "value", where.c_str());
  e.sent_id = optional_key<int>(j, "sent_id", where.c_str());
  e.raw_text = optional_key<std::string>(j, "raw", where.c_str());
  if (j.contains("span") && !j["span"].is_null()) {
    const auto& s = j["span"];
    e.source_span = SourceSpan{required<int>(s, "sent_id", where.c_str()),
                               required<std::size_t>(s, "char_start", where.c_str()),
                               required<std::size_t>(s, "char_end", where.c_str()),
                               s.value("ambiguous", false), s.value("sentence_level", false)};
  }
  e.score = optional_key<double>(j, "score", where.c_str());
  e.window_index = optional_key<int>(j, "window", where.c_str());
  auto status = extraction_status_from_string(required<std::string>(j, "status", where.c_str()));
  if (!status) throw FormatError(where + ": unknown status");
  e.status = *status;
  if (j.contains("notes")) e.notes = required<std::vector<std::string>>(j, "notes", where.c_str());
  e.raw_output = optional_key<std::string>(j, "raw_output", where.c_str());
  return e;
}

std::vector<json> read_jsonl(std::istream& in, const std::string& source) {
  std::vector<json> rows;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (text::trim(line).empty()) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw FormatError(source + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<json> read_jsonl_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return read_jsonl(in, path);
}

void write_jsonl(std::ostream& out, const std::vector<json>& rows) {
  for (const auto& r : rows) out << r.dump(-1, ' ', false, json::error_handler_t::strict) << '\n';
}

std::vector<DocumentRecord> read_documents(const std::string& path) {
  std::vector<DocumentRecord> docs;
  std::size_t n = 0;
  for (const auto& j : read_jsonl_file(path)) {
    ++n;
    try {
      docs.push_back(document_from_json(j));
    } catch (const FormatError& e) {
      throw FormatError(path + ": record " + std::to_string(n) + ": " + e.what());
    }
  }
  return docs;
}

void write_documents(const std::string& path, const std::vector<DocumentRecord>& docs) {
  auto out = open_out(path);
  for (const auto& d : docs) out << to_json(d).dump() << '\n';
}

std::vector<Extraction> read_extractions(const std::string& path) {
  std::vector<Extraction> rows;
  for (const auto& j : read_jsonl_file(path)) rows.push_back(extraction_from_json(j));
  return rows;
}

void write_extractions(const std::string& path, const std::vector<Extraction>& rows) {
  auto out = open_out(path);
  for (const auto& e : rows) out << to_json(e).dump() << '\n';
}

json RunManifest::to_json() const {
  return {{"tool_version", tool_version},
          {"timestamp", timestamp},
          {"schema", {{"path", schema_path}, {"fnv1a64", schema_hash}}},
          {"docs", docs_path},
          {"backend", {{"identity", backend}, {"score_definition", score_definition}}},
          {"token_counter", token_counter},
          {"num_beams", num_beams},
          {"max_new_tokens", max_new_tokens},
          {"budget", budget},
          {"safety_factor", safety_factor},
          {"overlap_rule", overlap_rule},
          {"variant", {{"compound", compound}, {"sent", sent}, {"raw", raw}}},
          {"documents", documents},
          {"failed_documents", failed_documents}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  try {
    m.tool_version = j.at("tool_version");
    m.timestamp = j.at("timestamp");
    m.schema_path = j.at("schema").at("path");
    m.schema_hash = j.at("schema").at("fnv1a64");
    m.docs_path = j.at("docs");
    m.backend = j.at("backend").at("identity");
    m.score_definition = j.at("backend").at("score_definition");
    m.token_counter = j.at("token_counter");
    m.num_beams = j.at("num_beams");
    m.max_new_tokens = j.at("max_new_tokens");
    m.budget = j.at("budget");
    m.safety_factor = j.at("safety_factor");
    m.overlap_rule = j.at("overlap_rule");
    m.compound = j.at("variant").at("compound");
    m.sent = j.at("variant").at("sent");
    m.raw = j.at("variant").at("raw");
    m.documents = j.at("documents");
    m.failed_documents = j.at("failed_documents");
  } catch (const json::exception& e) {
    throw FormatError(std::string("run manifest: ") + e.what());
  }
  return m;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ie
