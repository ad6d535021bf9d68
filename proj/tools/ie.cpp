// ie: command-line front end for the extraction pipeline.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "ie/corpus_io.hpp"
#include "ie/errors.hpp"
#include "ie/model_backend.hpp"
#include "ie/ner_export.hpp"
#include "ie/pipeline.hpp"
#include "ie/schema.hpp"

namespace {

struct Options {
  std::string schema, docs, out, pred, manifest, backend_url;
  bool oracle = false;
  bool compound = false, sent = false, raw = false;
  std::size_t budget = 512;
  double safety_factor = 0.8;
  double chars_per_token = 3.5;
  bool strict_oversize = false;
  int beams = 5;
  int max_new_tokens = 256;
  std::size_t workers = 1;
  std::size_t batch_size = 16;
  int retries = 4;
  double overlap_threshold = 0.01;
  bool quiet = false;
};

void add_variant_flags(CLI::App* cmd, Options& o) {
  cmd->add_flag("--compound", o.compound, "Ask one question per compound group");
  cmd->add_flag("--sent", o.sent, "Use sentence sentinels and sentence ids in answers");
  cmd->add_flag("--raw", o.raw, "Ask for the verbatim text alongside the canonical value");
  cmd->add_option("--budget", o.budget, "Token budget per prompt (question + context)")->capture_default_str();
  cmd->add_option("--safety-factor", o.safety_factor, "Fraction of the budget actually filled")
      ->capture_default_str()
      ->check(CLI::Range(0.01, 1.0));
  cmd->add_option("--chars-per-token", o.chars_per_token, "Ratio used by the approximate token counter")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--strict-oversize", o.strict_oversize, "Fail on sentences that exceed the budget instead of truncating");
}

ie::PromptOptions prompt_options(const Options& o) {
  ie::PromptOptions p;
  p.requested = {o.compound, o.sent, o.raw};
  p.budget = o.budget;
  p.safety_factor = o.safety_factor;
  p.oversize = o.strict_oversize ? ie::OversizePolicy::error : ie::OversizePolicy::truncate;
  return p;
}

void report_failures(const std::vector<ie::DocumentFailure>& failures) {
  for (const auto& f : failures) std::cerr << "error: document '" << f.doc_id << "': " << f.message << "\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ie::FormatError("cannot open '" + path + "' for writing");
  return out;
}

int cmd_prepare(const Options& o) {
  const auto schemas = ie::load_schema(o.schema);
  const auto docs = ie::read_documents(o.docs);
  const ie::ApproximateTokenCounter counter(o.chars_per_token);
  const auto result = ie::run_prepare(docs, schemas, prompt_options(o), counter);
  auto out = open_out(o.out);
  ie::write_jsonl(out, result.rows);
  report_failures(result.failures);
  if (!o.quiet)
    std::cerr << "prepared " << result.rows.size() << " examples from " << docs.size() - result.failures.size() << "/"
              << docs.size() << " documents\n";
  if (result.failures.empty()) return 0;
  return result.failures.size() >= docs.size() ? 1 : 2;
}

int cmd_extract(Options o) {
  if (o.backend_url.empty())
    if (const char* env = std::getenv("IE_BACKEND_URL")) o.backend_url = env;
  if (o.oracle == !o.backend_url.empty()) {
    std::cerr << "error: give exactly one of --oracle or --backend-url (or IE_BACKEND_URL)\n";
    return 1;
  }
  const std::string schema_text = ie::read_file(o.schema);
  const auto schemas = ie::parse_schema(schema_text);
  const auto docs = ie::read_documents(o.docs);
  const auto options = prompt_options(o);
  const ie::ApproximateTokenCounter approx(o.chars_per_token);

  std::unique_ptr<ie::Backend> backend;
  std::unique_ptr<ie::TokenCounter> remote_counter;
  const ie::TokenCounter* counter = &approx;
  if (o.oracle) {
    auto oracle = std::make_unique<ie::OracleBackend>(ie::OracleBackend::from_gold(docs, schemas, options, approx));
    if (oracle->collisions() && !o.quiet)
      std::cerr << "warning: " << oracle->collisions() << " oracle prompts had conflicting gold answers\n";
    backend = std::move(oracle);
  } else {
    ie::RemoteOptions ro;
    ro.url = o.backend_url;
    ro.max_attempts = o.retries;
    ro.batch_size = o.batch_size;
    auto remote = std::make_unique<ie::RemoteBackend>(ro);
    const auto model = remote->health();
    if (!o.quiet) std::cerr << "backend " << o.backend_url << " is serving " << model << "\n";
    remote_counter = std::make_unique<ie::RemoteTokenCounter>(*remote, approx);
    counter = remote_counter.get();
    backend = std::move(remote);
  }

  const auto result = ie::run_extract(docs, schemas, options, {o.beams, o.max_new_tokens}, *backend, *counter, o.workers);
  ie::write_extractions(o.out, result.extractions);
  if (!o.quiet)
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  report_failures(result.failures);

  ie::RunManifest m;
  m.tool_version = ie::kToolVersion;
  m.timestamp = ie::utc_timestamp();
  m.schema_path = o.schema;
  m.schema_hash = ie::fnv1a_hex(schema_text);
  m.docs_path = o.docs;
  m.backend = backend->identity();
  m.score_definition = backend->score_definition();
  m.token_counter = counter->identity();
  m.num_beams = o.beams;
  m.max_new_tokens = o.max_new_tokens;
  m.budget = o.budget;
  m.safety_factor = o.safety_factor;
  m.compound = o.compound;
  m.sent = o.sent;
  m.raw = o.raw;
  m.documents = docs.size();
  m.failed_documents = result.failures.size();
  const std::string manifest_path = o.manifest.empty() ? o.out + ".manifest.json" : o.manifest;
  open_out(manifest_path) << m.to_json().dump(2) << "\n";

  if (!o.quiet)
    std::cerr << "extracted " << result.extractions.size() << " fields from " << docs.size() - result.failures.size()
              << "/" << docs.size() << " documents\n";
  return result.exit_code();
}

void print_report(const ie::CorpusReport& r) {
  auto pct = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%6.1f", ie::round_decimal(v, 1));
    return std::string(buf);
  };
  std::cout << "dataset                EM      F1   fields  instances\n";
  for (const auto& d : r.datasets) {
    std::string name = d.dataset.substr(0, 20);
    name.resize(20, ' ');
    std::cout << name << pct(d.em) << "  " << pct(d.f1) << "  " << d.fields << "  " << d.instances << "\n";
  }
  std::cout << "Avg                 " << pct(r.avg_em) << "  " << pct(r.avg_f1) << "\n";
}

int cmd_evaluate(const Options& o) {
  const auto preds = ie::read_extractions(o.pred);
  const auto gold = ie::read_documents(o.docs);
  std::optional<std::vector<ie::DocumentTypeSchema>> schemas;
  if (!o.schema.empty()) schemas = ie::load_schema(o.schema);
  const auto result = ie::run_evaluate(preds, gold, schemas ? &*schemas : nullptr);
  for (const auto& id : result.missing_predictions) std::cerr << "warning: no predictions for document '" << id << "'\n";
  for (const auto& id : result.unknown_predictions) std::cerr << "warning: predictions for unknown document '" << id << "'\n";
  if (!o.out.empty()) open_out(o.out) << result.to_json().dump(2) << "\n";
  if (!o.quiet) print_report(result.report);
  return result.missing_predictions.empty() ? 0 : 2;
}

int cmd_audit(const Options& o) {
  const auto preds = ie::read_extractions(o.pred);
  const auto docs = ie::read_documents(o.docs);
  auto out = open_out(o.out);
  ie::write_audit_html(out, preds, docs);
  return 0;
}

int cmd_ner_export(const Options& o) {
  const auto docs = ie::read_documents(o.docs);
  const auto reduced = ie::reduce_corpus(docs, {o.overlap_threshold});
  auto out = open_out(o.out);
  ie::write_conll(out, reduced.documents);
  open_out(o.out + ".report.json") << reduced.report.to_json().dump(2) << "\n";
  if (!o.quiet) {
    const auto& r = reduced.report;
    std::cerr << "kept " << r.documents_out << "/" << r.documents_in << " documents and " << r.fields_out << "/"
              << r.fields_in << " fields\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Question-answering based information extraction from documents"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("-q,--quiet", o.quiet, "Suppress progress output");

  auto* prepare = app.add_subcommand("prepare", "Write question/context/target training examples");
  prepare->add_option("--schema", o.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
  prepare->add_option("--docs", o.docs, "Annotated documents (JSONL)")->required()->check(CLI::ExistingFile);
  prepare->add_option("--out", o.out, "Output JSONL")->required();
  add_variant_flags(prepare, o);

  auto* extract = app.add_subcommand("extract", "Extract fields with a model backend");
  extract->add_option("--schema", o.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
  extract->add_option("--docs", o.docs, "Documents (JSONL)")->required()->check(CLI::ExistingFile);
  extract->add_option("--out", o.out, "Extractions (JSONL)")->required();
  extract->add_option("--manifest", o.manifest, "Run manifest path (default: <out>.manifest.json)");
  extract->add_option("--backend-url", o.backend_url, "Inference server, e.g. http://localhost:8080 (env IE_BACKEND_URL)");
  extract->add_flag("--oracle", o.oracle, "Answer from the gold annotations in --docs");
  extract->add_option("--beams", o.beams, "Beam count")->capture_default_str()->check(CLI::PositiveNumber);
  extract->add_option("--max-new-tokens", o.max_new_tokens, "Generation length limit")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  extract->add_option("--workers", o.workers, "Documents processed concurrently")->capture_default_str()->check(CLI::PositiveNumber);
  extract->add_option("--batch-size", o.batch_size, "Prompts per backend request")->capture_default_str()->check(CLI::PositiveNumber);
  extract->add_option("--retries", o.retries, "Attempts per backend request")->capture_default_str()->check(CLI::PositiveNumber);
  add_variant_flags(extract, o);

  auto* evaluate = app.add_subcommand("evaluate", "Score extractions against gold annotations");
  evaluate->add_option("--pred", o.pred, "Extractions (JSONL)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--docs", o.docs, "Gold documents (JSONL)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--schema", o.schema, "Schema JSON; limits scoring to its fields")->check(CLI::ExistingFile);
  evaluate->add_option("--out", o.out, "Report JSON");

  auto* audit = app.add_subcommand("audit", "Write a static HTML audit report");
  audit->add_option("--pred", o.pred, "Extractions (JSONL)")->required()->check(CLI::ExistingFile);
  audit->add_option("--docs", o.docs, "Documents (JSONL)")->required()->check(CLI::ExistingFile);
  audit->add_option("--out", o.out, "Output HTML")->required();

  auto* ner = app.add_subcommand("ner-export", "Export span annotations as CoNLL-style BIO");
  ner->add_option("--docs", o.docs, "Annotated documents (JSONL)")->required()->check(CLI::ExistingFile);
  ner->add_option("--out", o.out, "Output CoNLL file; the report goes to <out>.report.json")->required();
  ner->add_option("--overlap-threshold", o.overlap_threshold,
                  "Drop a class overlapping others in more than this fraction of documents")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prepare) return cmd_prepare(o);
    if (*extract) return cmd_extract(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*audit) return cmd_audit(o);
    if (*ner) return cmd_ner_export(o);
  } catch (const ie::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
