#include "ie/model_backend.hpp"

#include <cmath>
#include <iostream>
#include <thread>

#include <httplib.h>

#include "ie/errors.hpp"
#include "ie/segmentation.hpp"

namespace ie {

using nlohmann::json;

nlohmann::json to_json(const GenerationRequest& request) {
  json items = json::array();
  for (const auto& it : request.items) items.push_back({{"question", it.question}, {"context", it.context}});
  return {{"items", items}, {"num_beams", request.num_beams}, {"max_new_tokens", request.max_new_tokens}};
}

GenerationRequest generation_request_from_json(const nlohmann::json& j) {
  GenerationRequest r;
  if (!j.is_object() || !j.contains("items") || !j["items"].is_array())
    throw ProtocolError("generate request: 'items' must be an array");
  for (const auto& it : j["items"]) {
    if (!it.is_object() || !it.contains("question") || !it["question"].is_string() || !it.contains("context") ||
        !it["context"].is_string())
      throw ProtocolError("generate request: every item needs string 'question' and 'context'");
    r.items.push_back({it["question"].get<std::string>(), it["context"].get<std::string>()});
  }
  r.num_beams = j.value("num_beams", 5);
  r.max_new_tokens = j.value("max_new_tokens", 256);
  if (r.num_beams < 1 || r.max_new_tokens < 1) throw ProtocolError("generate request: num_beams and max_new_tokens must be >= 1");
  return r;
}

nlohmann::json to_json(const GenerationResponse& response) {
  json items = json::array();
  for (const auto& it : response.items) items.push_back({{"text", it.text}, {"score", it.score}});
  return {{"items", items}};
}

GenerationResponse generation_response_from_json(const nlohmann::json& j, std::size_t expected_items) {
  if (!j.is_object() || !j.contains("items") || !j["items"].is_array())
    throw ProtocolError("generate response: 'items' must be an array");
  const auto& items = j["items"];
  if (items.size() != expected_items)
    throw ProtocolError("generate response: " + std::to_string(items.size()) + " items for " +
                        std::to_string(expected_items) + " requested");
  GenerationResponse r;
  for (const auto& it : items) {
    if (!it.is_object() || !it.contains("text") || !it["text"].is_string() || !it.contains("score") ||
        !it["score"].is_number())
      throw ProtocolError("generate response: every item needs string 'text' and numeric 'score'");
    double score = it["score"].get<double>();
    if (!std::isfinite(score)) throw ProtocolError("generate response: non-finite score");
    r.items.push_back({it["text"].get<std::string>(), score});
  }
  return r;
}

// --- oracle ---------------------------------------------------------------

void OracleBackend::add(const std::string& question, const std::string& context, Entry entry) {
  auto [it, inserted] = table_.try_emplace({question, context}, entry);
  if (!inserted && it->second.text != entry.text) ++collisions_;
}

OracleBackend OracleBackend::from_gold(const std::vector<DocumentRecord>& docs,
                                       const std::vector<DocumentTypeSchema>& schemas,
                                       const PromptOptions& options,
                                       const TokenCounter& counter) {
  OracleBackend oracle;
  for (const auto& record : docs) {
    const auto* schema = find_doc_type(schemas, record.doc_type);
    if (!schema) throw AnnotationError("document '" + record.doc_id + "': unknown doc_type '" + record.doc_type + "'");
    const auto doc = segment(record.doc_id, record.text);
    const auto units = question_units(*schema, options.requested);
    for (const auto& unit : units) {
      for (const auto& prompt : build_prompts(doc, std::vector<QuestionUnit>{unit}, options, counter)) {
        auto target = build_training_target(prompt, unit, record.annotations, doc);
        double score = 0.0;
        if (target.contained > 0 && target.contained < target.annotated)
          score = std::log(static_cast<double>(target.contained) / static_cast<double>(target.annotated));
        oracle.add(prompt.question, prompt.context, {std::move(target.text), score});
      }
    }
  }
  return oracle;
}

GenerationResponse OracleBackend::generate(const GenerationRequest& request) {
  GenerationResponse r;
  r.items.reserve(request.items.size());
  for (const auto& item : request.items) {
    auto it = table_.find({item.question, item.context});
    if (it == table_.end())
      r.items.push_back({"N/A", 0.0});
    else
      r.items.push_back({it->second.text, it->second.score});
  }
  return r;
}

std::string OracleBackend::identity() const { return "oracle(entries=" + std::to_string(table_.size()) + ")"; }

std::string OracleBackend::score_definition() const {
  return "0 for complete gold answers; ln(contained/annotated) for partial compound answers";
}

// --- remote ---------------------------------------------------------------

RemoteBackend::RemoteBackend(RemoteOptions options) : options_(std::move(options)) {
  if (options_.url.empty()) throw TransportError("no backend URL configured");
  if (options_.max_attempts < 1) options_.max_attempts = 1;
  if (options_.batch_size == 0) options_.batch_size = 1;
  if (options_.parallelism == 0) options_.parallelism = 1;
}

nlohmann::json RemoteBackend::post(const std::string& path, const nlohmann::json& body, const std::string& correlation_id) {
  auto backoff = options_.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    ++attempts_;
    httplib::Client client(options_.url);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers{{"X-Request-Id", correlation_id}};

    httplib::Result res = path == "/v1/health" ? client.Get(path, headers)
                                                : client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
    } else if (res->status >= 500 || res->status == 429) {
      last_error = "HTTP " + std::to_string(res->status);
    } else if (res->status != 200) {
      throw ProtocolError(path + ": HTTP " + std::to_string(res->status) + ": " + res->body);
    } else {
      try {
        return json::parse(res->body);
      } catch (const json::parse_error& e) {
        throw ProtocolError(path + ": response is not JSON: " + e.what());
      }
    }
    if (attempt < options_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(backoff.count()) * options_.backoff_multiplier));
    }
  }
  throw TransportError(options_.url + path + " failed after " + std::to_string(options_.max_attempts) +
                       " attempts: " + last_error);
}

GenerationResponse RemoteBackend::generate_batch(const GenerationRequest& request, const std::string& correlation_id) {
  return generation_response_from_json(post("/v1/generate", to_json(request), correlation_id), request.items.size());
}

GenerationResponse RemoteBackend::generate(const GenerationRequest& request) {
  const std::size_t n = request.items.size();
  const std::size_t batches = (n + options_.batch_size - 1) / options_.batch_size;
  std::vector<GenerationResponse> parts(batches);
  std::vector<std::exception_ptr> errors(batches);
  std::atomic<std::size_t> next{0};
  const std::string run_id = std::to_string(next_id_++);

  auto worker = [&] {
    for (std::size_t b; (b = next++) < batches;) {
      GenerationRequest sub;
      sub.num_beams = request.num_beams;
      sub.max_new_tokens = request.max_new_tokens;
      const std::size_t begin = b * options_.batch_size;
      const std::size_t end = std::min(n, begin + options_.batch_size);
      sub.items.assign(request.items.begin() + static_cast<std::ptrdiff_t>(begin),
                       request.items.begin() + static_cast<std::ptrdiff_t>(end));
      try {
        parts[b] = generate_batch(sub, run_id + "-" + std::to_string(b));
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(options_.parallelism, batches);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  GenerationResponse out;
  out.items.reserve(n);
  for (auto& p : parts)
    for (auto& it : p.items) out.items.push_back(std::move(it));
  return out;
}

std::string RemoteBackend::health() {
  auto j = post("/v1/health", json::object(), "health");
  if (!j.is_object() || j.value("status", "") != "ok") throw ProtocolError("health: status is not ok");
  model_name_ = j.value("model", "unknown");
  return model_name_;
}

std::vector<std::size_t> RemoteBackend::tokenize(const std::vector<std::string>& texts) {
  auto j = post("/v1/tokenize", {{"texts", texts}}, "tokenize-" + std::to_string(next_id_++));
  if (!j.is_object() || !j.contains("counts") || !j["counts"].is_array() || j["counts"].size() != texts.size())
    throw ProtocolError("tokenize: 'counts' must have one entry per text");
  std::vector<std::size_t> counts;
  for (const auto& c : j["counts"]) {
    if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<long long>() >= 0))
      throw ProtocolError("tokenize: counts must be non-negative integers");
    counts.push_back(c.get<std::size_t>());
  }
  return counts;
}

std::string RemoteBackend::identity() const {
  return "remote(" + options_.url + (model_name_.empty() ? "" : ", model=" + model_name_) + ")";
}

std::string RemoteBackend::score_definition() const {
  return "server-reported natural-log probability of the selected beam";
}

RemoteTokenCounter::RemoteTokenCounter(RemoteBackend& backend, ApproximateTokenCounter fallback)
    : backend_(backend), fallback_(fallback) {}

std::size_t RemoteTokenCounter::count(std::string_view text) const {
  if (text.empty()) return 0;
  if (fell_back_) return fallback_.count(text);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(text); it != cache_.end()) return it->second;
  }
  try {
    auto counts = backend_.tokenize({std::string(text)});
    std::lock_guard lock(cache_mutex_);
    cache_.emplace(std::string(text), counts.at(0));
    return counts[0];
  } catch (const Error& e) {
    if (!fell_back_.exchange(true))
      std::cerr << "warning: remote tokenizer unavailable (" << e.what() << "); using " << fallback_.identity() << "\n";
    return fallback_.count(text);
  }
}

std::string RemoteTokenCounter::identity() const {
  return fell_back_ ? "remote-fallback:" + fallback_.identity() : "remote:" + backend_.identity();
}

}  // namespace ie
