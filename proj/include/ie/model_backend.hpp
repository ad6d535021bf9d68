#pragma once

// Answer generation behind an inference boundary.
//
// Wire protocol (HTTP, JSON, UTF-8):
//   POST /v1/generate  {"items":[{"question":..,"context":..}],"num_beams":5,"max_new_tokens":256}
//                      -> {"items":[{"text":..,"score":-1.234}]}
//   POST /v1/tokenize  {"texts":[..]} -> {"counts":[N,..]}
//   GET  /v1/health    -> {"status":"ok","model":"<name>"}
//
// Scores are natural-log probabilities of the returned beam and must be
// comparable across windows of one question.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ie/document.hpp"
#include "ie/prompting.hpp"
#include "ie/schema.hpp"
#include "ie/token_counter.hpp"

namespace ie {

struct GenerationItem {
  std::string question;
  std::string context;
};

struct GenerationRequest {
  std::vector<GenerationItem> items;
  int num_beams = 5;
  int max_new_tokens = 256;
};

struct GeneratedAnswer {
  std::string text;
  double score = 0.0;
};

struct GenerationResponse {
  std::vector<GeneratedAnswer> items;
};

nlohmann::json to_json(const GenerationRequest& request);
/// Throws ProtocolError on a malformed body.
GenerationRequest generation_request_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GenerationResponse& response);
/// Checks item count and finite scores against the request size.
GenerationResponse generation_response_from_json(const nlohmann::json& j, std::size_t expected_items);

class Backend {
 public:
  virtual ~Backend() = default;
  /// Position i of the response answers item i of the request.
  virtual GenerationResponse generate(const GenerationRequest& request) = 0;
  virtual std::string identity() const = 0;
  /// How scores are defined, recorded in run manifests.
  virtual std::string score_definition() const = 0;
};

/// Deterministic test model: answers every (question, context) pair from
/// gold annotations, "N/A" with score 0 when the pair is unknown.
class OracleBackend final : public Backend {
 public:
  struct Entry {
    std::string text;
    double score = 0.0;
  };

  OracleBackend() = default;

  /// Adds one entry; an existing key keeps its first entry.
  void add(const std::string& question, const std::string& context, Entry entry);

  /// Build the table from gold documents exactly as the extractor will prompt
  /// them. Full answers score 0; a compound answer holding only some of its
  /// annotated members scores ln(contained / annotated).
  static OracleBackend from_gold(const std::vector<DocumentRecord>& docs,
                                 const std::vector<DocumentTypeSchema>& schemas,
                                 const PromptOptions& options,
                                 const TokenCounter& counter);

  GenerationResponse generate(const GenerationRequest& request) override;
  std::string identity() const override;
  std::string score_definition() const override;

  std::size_t size() const { return table_.size(); }
  std::size_t collisions() const { return collisions_; }

 private:
  std::map<std::pair<std::string, std::string>, Entry> table_;
  std::size_t collisions_ = 0;
};

struct RemoteOptions {
  std::string url;  // scheme://host:port
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{200};
  double backoff_multiplier = 2.0;
  std::chrono::milliseconds timeout{120000};
  std::size_t batch_size = 16;
  std::size_t parallelism = 4;  // concurrent in-flight batches
};

/// HTTP client for the wire protocol. Transient failures (connection errors,
/// 5xx, 429) are retried with exponential backoff; other failures throw.
class RemoteBackend final : public Backend {
 public:
  explicit RemoteBackend(RemoteOptions options);

  GenerationResponse generate(const GenerationRequest& request) override;
  std::string identity() const override;
  std::string score_definition() const override;

  /// GET /v1/health; returns the model name. Throws TransportError/ProtocolError.
  std::string health();
  std::vector<std::size_t> tokenize(const std::vector<std::string>& texts);

  const RemoteOptions& options() const { return options_; }
  std::size_t attempts_made() const { return attempts_.load(); }

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body, const std::string& correlation_id);
  GenerationResponse generate_batch(const GenerationRequest& request, const std::string& correlation_id);

  RemoteOptions options_;
  std::string model_name_;
  std::atomic<std::size_t> attempts_{0};
  std::atomic<std::size_t> next_id_{0};
};

/// Counts via the server's /v1/tokenize; on failure falls back to the
/// approximate counter and reports it once on stderr.
class RemoteTokenCounter final : public TokenCounter {
 public:
  RemoteTokenCounter(RemoteBackend& backend, ApproximateTokenCounter fallback = ApproximateTokenCounter());
  std::size_t count(std::string_view text) const override;
  std::string identity() const override;
  bool fell_back() const { return fell_back_.load(); }

 private:
  RemoteBackend& backend_;
  ApproximateTokenCounter fallback_;
  mutable std::atomic<bool> fell_back_{false};
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, std::size_t, std::less<>> cache_;
};

}  // namespace ie
