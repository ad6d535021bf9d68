#pragma once

// JSONL file formats. All offsets are code point offsets into the decoded
// UTF-8 text, end exclusive.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ie/aggregation.hpp"
#include "ie/document.hpp"

namespace ie {

nlohmann::json to_json(const DocumentRecord& record);
/// Throws FormatError on missing keys or a raw span that does not match the text.
DocumentRecord document_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Extraction& e);
Extraction extraction_from_json(const nlohmann::json& j);

/// One JSON object per line; blank lines are skipped. Errors name the line.
std::vector<nlohmann::json> read_jsonl(std::istream& in, const std::string& source = "<input>");
std::vector<nlohmann::json> read_jsonl_file(const std::string& path);
void write_jsonl(std::ostream& out, const std::vector<nlohmann::json>& rows);

std::vector<DocumentRecord> read_documents(const std::string& path);
void write_documents(const std::string& path, const std::vector<DocumentRecord>& docs);
std::vector<Extraction> read_extractions(const std::string& path);
void write_extractions(const std::string& path, const std::vector<Extraction>& rows);

struct RunManifest {
  std::string tool_version;
  std::string timestamp;  // UTC, ISO 8601
  std::string schema_path;
  std::string schema_hash;  // FNV-1a 64 of the schema file bytes
  std::string docs_path;
  std::string backend;
  std::string score_definition;
  std::string token_counter;
  int num_beams = 5;
  int max_new_tokens = 256;
  std::size_t budget = 512;
  double safety_factor = 0.8;
  std::string overlap_rule = "greedy fill, next window starts ceil(k/2) sentences later";
  bool compound = false, sent = false, raw = false;
  std::size_t documents = 0, failed_documents = 0;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

std::string fnv1a_hex(std::string_view bytes);
std::string read_file(const std::string& path);
std::string utc_timestamp();

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace ie
