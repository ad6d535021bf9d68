#include <doctest.h>

#include <atomic>
#include <set>
#include <thread>

#include <httplib.h>

#include "ie/errors.hpp"
#include "ie/model_backend.hpp"

using namespace ie;
using nlohmann::json;

namespace {

// In-process wire-protocol server: answers "N/A" with score 0 and counts
// words for /v1/tokenize. The first `failures` generate calls get HTTP 503.
class StubServer {
 public:
  explicit StubServer(int failures = 0, int status = 503) : failures_(failures), status_(status) {
    server_.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok","model":"stub"})", "application/json");
    });
    server_.Post("/v1/generate", [this](const httplib::Request& req, httplib::Response& res) {
      ++generate_calls_;
      {
        std::lock_guard lock(mutex_);
        request_ids_.insert(req.get_header_value("X-Request-Id"));
      }
      if (failures_-- > 0) {
        res.status = status_;
        return;
      }
      auto body = generation_request_from_json(json::parse(req.body));
      GenerationResponse out;
      for (const auto& item : body.items) out.items.push_back({"N/A " + item.question, 0.0});
      res.set_content(to_json(out).dump(), "application/json");
    });
    server_.Post("/v1/tokenize", [](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      json counts = json::array();
      for (const auto& t : body["texts"]) counts.push_back(t.get<std::string>().size());
      res.set_content(json{{"counts", counts}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int generate_calls() const { return generate_calls_; }
  std::set<std::string> request_ids() {
    std::lock_guard lock(mutex_);
    return request_ids_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> failures_;
  int status_;
  std::atomic<int> generate_calls_{0};
  std::mutex mutex_;
  std::set<std::string> request_ids_;
};

RemoteOptions fast(const std::string& url) {
  RemoteOptions o;
  o.url = url;
  o.initial_backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::milliseconds(2000);
  o.batch_size = 3;
  o.parallelism = 2;
  return o;
}

GenerationRequest numbered(int n) {
  GenerationRequest r;
  for (int i = 0; i < n; ++i) r.items.push_back({"q" + std::to_string(i), "c"});
  return r;
}

}  // namespace

TEST_CASE("wire format round trip") {
  GenerationRequest r = numbered(2);
  r.num_beams = 3;
  auto back = generation_request_from_json(to_json(r));
  CHECK(back.items.size() == 2);
  CHECK(back.items[1].question == "q1");
  CHECK(back.num_beams == 3);
  CHECK(back.max_new_tokens == 256);
  CHECK_THROWS_AS(generation_request_from_json(json{{"items", 3}}), ProtocolError);

  GenerationResponse resp{{{"[value]: 1", -0.25}}};
  CHECK(generation_response_from_json(to_json(resp), 1).items[0].score == -0.25);
  CHECK_THROWS_AS(generation_response_from_json(to_json(resp), 2), ProtocolError);
  CHECK_THROWS_AS(generation_response_from_json(json{{"items", {{{"text", "x"}}}}}, 1), ProtocolError);
}

TEST_CASE("oracle answers known pairs and N/A otherwise") {
  OracleBackend o;
  o.add("q", "c", {"[value]: 1", -0.5});
  o.add("q", "c", {"[value]: 2", 0.0});
  CHECK(o.collisions() == 1);
  auto r = o.generate({{{"q", "c"}, {"q", "other"}}});
  CHECK(r.items[0].text == "[value]: 1");
  CHECK(r.items[0].score == -0.5);
  CHECK(r.items[1].text == "N/A");
  CHECK(r.items[1].score == 0.0);
}

TEST_CASE("remote client keeps item order across batches") {
  StubServer server;
  RemoteBackend backend(fast(server.url()));
  CHECK(backend.health() == "stub");
  auto r = backend.generate(numbered(10));
  REQUIRE(r.items.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(r.items[static_cast<std::size_t>(i)].text == "N/A q" + std::to_string(i));
  CHECK(server.generate_calls() == 4);
  CHECK(server.request_ids().size() == 4);
  CHECK(backend.identity().find("stub") != std::string::npos);
}

TEST_CASE("remote tokenizer") {
  StubServer server;
  RemoteBackend backend(fast(server.url()));
  CHECK(backend.tokenize({"abc", "de"}) == std::vector<std::size_t>{3, 2});
  RemoteTokenCounter counter(backend);
  CHECK(counter.count("hello") == 5);
  CHECK_FALSE(counter.fell_back());
}

TEST_CASE("transient failures are retried") {
  StubServer server(2);
  RemoteBackend backend(fast(server.url()));
  auto r = backend.generate(numbered(2));
  CHECK(r.items.size() == 2);
  CHECK(server.generate_calls() == 3);
  CHECK(backend.attempts_made() == 3);
}

TEST_CASE("client errors are not retried") {
  StubServer server(1, 400);
  RemoteBackend backend(fast(server.url()));
  CHECK_THROWS_AS(backend.generate(numbered(1)), ProtocolError);
  CHECK(server.generate_calls() == 1);
}

TEST_CASE("unreachable server exhausts retries") {
  auto opts = fast("http://127.0.0.1:1");  // nothing listens on port 1
  opts.max_attempts = 3;
  RemoteBackend backend(opts);
  CHECK_THROWS_AS(backend.generate(numbered(1)), TransportError);
  CHECK(backend.attempts_made() == 3);

  RemoteTokenCounter counter(backend);
  CHECK(counter.count("abcdefg") == 2);
  CHECK(counter.fell_back());
}
