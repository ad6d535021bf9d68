#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <unistd.h>

#include "ie/corpus_io.hpp"
#include "ie/model_backend.hpp"
#include "synthetic.hpp"

using namespace ie;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir = fs::temp_directory_path() / ("ie_cli_" + std::to_string(::getpid()));
  std::string schema = (dir / "schema.json").string();
  std::string docs = (dir / "docs.jsonl").string();
  synth::Corpus corpus = synth::make_corpus(5, 8);

  Workspace() {
    fs::create_directories(dir);
    std::ofstream(schema) << corpus.schema_json;
    write_documents(docs, corpus.docs);
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  int ie(const std::string& args, const std::string& env = "") const {
    const std::string cmd = env + " " + IE_BINARY + " -q " + args + " 2>" + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
};

std::size_t line_count(const std::string& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

// Replies to every prompt with text the parser rejects.
class GarbageServer {
 public:
  GarbageServer() {
    server_.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok","model":"garbage"})", "application/json");
    });
    server_.Post("/v1/generate", [](const httplib::Request& req, httplib::Response& res) {
      const auto body = generation_request_from_json(nlohmann::json::parse(req.body));
      GenerationResponse out;
      for (std::size_t i = 0; i < body.items.size(); ++i) out.items.push_back({"<b>value is 7", -1.5});
      res.set_content(to_json(out).dump(), "application/json");
    });
    server_.Post("/v1/tokenize", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~GarbageServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace

TEST_CASE("prepare writes one line per prompt") {
  Workspace w;
  CHECK(w.ie("prepare --schema " + w.schema + " --docs " + w.docs + " --out " + w.path("train.jsonl") +
             " --compound --sent --raw") == 0);
  const auto rows = read_jsonl_file(w.path("train.jsonl"));
  REQUIRE(!rows.empty());
  bool row8 = false;
  for (const auto& r : rows) {
    CHECK(r.contains("doc_id"));
    CHECK(r.contains("window"));
    CHECK(r["field"] != "area_value");  // replaced by the group question
    const std::string target = r["target"];
    if (r["field"] == "private_area" && target != "N/A")
      row8 = row8 || (target.starts_with("[SENT") && target.find("[value]: ") != std::string::npos &&
                      target.find(" [text] ") != std::string::npos && target.find("[unit]: m²") != std::string::npos);
  }
  CHECK(row8);
}

TEST_CASE("extract needs exactly one backend") {
  Workspace w;
  const auto base = "extract --schema " + w.schema + " --docs " + w.docs + " --out " + w.path("p.jsonl");
  CHECK(w.ie(base, "env -u IE_BACKEND_URL") == 1);
  CHECK(w.ie(base + " --oracle --backend-url http://127.0.0.1:1") == 1);
}

TEST_CASE("unreachable backend fails after retries") {
  Workspace w;
  const auto base = "extract --schema " + w.schema + " --docs " + w.docs + " --out " + w.path("p.jsonl") + " --retries 2";
  CHECK(w.ie(base + " --backend-url http://127.0.0.1:1") == 1);
  CHECK(w.ie(base, "IE_BACKEND_URL=http://127.0.0.1:1") == 1);
  std::ifstream err(w.path("stderr.txt"));
  std::string all((std::istreambuf_iterator<char>(err)), {});
  CHECK(all.find("failed after 2 attempts") != std::string::npos);
}

TEST_CASE("oracle run writes extractions, manifest and a perfect report") {
  Workspace w;
  CHECK(w.ie("extract --oracle --compound --sent --schema " + w.schema + " --docs " + w.docs + " --out " +
             w.path("p.jsonl")) == 0);
  const auto manifest = nlohmann::json::parse(read_file(w.path("p.jsonl.manifest.json")));
  CHECK(manifest["variant"]["compound"] == true);
  CHECK(manifest["variant"]["raw"] == false);
  CHECK(manifest["num_beams"] == 5);
  CHECK(manifest["budget"] == 512);
  CHECK(manifest["schema"]["fnv1a64"] == fnv1a_hex(read_file(w.schema)));

  CHECK(w.ie("evaluate --pred " + w.path("p.jsonl") + " --docs " + w.docs + " --out " + w.path("r.json")) == 0);
  const auto report = nlohmann::json::parse(read_file(w.path("r.json")));
  CHECK(report["average"]["em"] == 100.0);

  // Dropping one document's predictions is reported and gives exit code 2.
  std::ifstream in(w.path("p.jsonl"));
  std::ofstream out(w.path("partial.jsonl"));
  for (std::string line; std::getline(in, line);)
    if (line.find(w.corpus.docs[0].doc_id) == std::string::npos) out << line << "\n";
  out.close();
  CHECK(w.ie("evaluate --pred " + w.path("partial.jsonl") + " --docs " + w.docs) == 2);

  CHECK(w.ie("audit --pred " + w.path("p.jsonl") + " --docs " + w.docs + " --out " + w.path("a.html")) == 0);
  CHECK(read_file(w.path("a.html")).find("<mark>") != std::string::npos);
}

TEST_CASE("malformed model output is kept for the audit") {
  Workspace w;
  GarbageServer server;
  CHECK(w.ie("extract --backend-url " + server.url() + " --schema " + w.schema + " --docs " + w.docs + " --out " +
             w.path("p.jsonl")) == 0);
  const auto rows = read_extractions(w.path("p.jsonl"));
  REQUIRE(!rows.empty());
  for (const auto& e : rows) CHECK(e.status == ExtractionStatus::malformed_all);
  const auto manifest = nlohmann::json::parse(read_file(w.path("p.jsonl.manifest.json")));
  CHECK(std::string(manifest["token_counter"]).starts_with("remote-fallback"));

  CHECK(w.ie("audit --pred " + w.path("p.jsonl") + " --docs " + w.docs + " --out " + w.path("a.html")) == 0);
  const auto html = read_file(w.path("a.html"));
  CHECK(html.find("malformed") != std::string::npos);
  CHECK(html.find("&lt;b&gt;value is 7") != std::string::npos);
}

TEST_CASE("ner-export writes CoNLL and a report") {
  Workspace w;
  CHECK(w.ie("ner-export --docs " + w.docs + " --out " + w.path("n.conll")) == 0);
  CHECK(read_file(w.path("n.conll")).starts_with("-DOCSTART- -X- -X- O\n"));
  const auto report = nlohmann::json::parse(read_file(w.path("n.conll.report.json")));
  CHECK(report["documents_in"] == 8);
  CHECK(report["classification_fields"] == nlohmann::json::array({"property_type"}));
}
