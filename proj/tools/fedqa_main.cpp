// fedqa command line: serve, search, chat, eval.

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>

#include "fedqa/api_server.hpp"
#include "fedqa/config.hpp"
#include "fedqa/error.hpp"
#include "fedqa/evalkit.hpp"
#include "fedqa/gateway.hpp"
#include "fedqa/json_io.hpp"

namespace {

using namespace fedqa;

constexpr int kUsage = 1;
constexpr int kProvider = 2;

struct Options {
  std::string config_path;
  std::string registry_path;
  std::string input;
  std::string output;
  std::string provider = "stub";
  std::string query;
  std::string corpus;
  std::string host;
  int port = -1;
  std::uint64_t seed = 42;
  bool bm25_raw = false;
  bool verbose = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

config::ServiceConfig load_config(const Options& o) {
  auto cfg = o.config_path.empty() ? config::ServiceConfig{} : config::ServiceConfig::from_file(o.config_path);
  if (!o.registry_path.empty()) cfg.registry_path = o.registry_path;
  if (o.provider == "remote") {
    cfg.llm.kind = "remote";
  } else if (o.provider == "stub") {
    if (o.config_path.empty()) cfg.llm.kind = "stub";
  } else {
    throw UsageError("--provider must be stub or remote");
  }
  cfg.validate();
  return cfg;
}

config::ServiceConfig gateway_config(const Options& o) {
  auto cfg = load_config(o);
  if (cfg.registry_path.empty()) throw UsageError("a source registry is needed: pass --config or --registry");
  return cfg;
}

void print_search(const gateway::SearchResult& r) {
  fmt::print("query: {}\nsession: {}\nrecords: {} unique of {} fetched in {:.3f} s\n", r.query, r.session_id,
             r.unique_records, r.total_records, r.latency_seconds);
  for (const auto& s : r.sources) {
    fmt::print("  source {:<16} {:<7} {:>4} records {:.3f} s{}\n", s.id, federation::to_string(s.status), s.records,
               s.latency_seconds, s.message.empty() ? "" : "  (" + s.message + ")");
  }
  for (const auto& g : r.groups) {
    fmt::print("\n[{}] {}\n", taxonomy::to_string(g.facet), g.records.size());
    std::size_t rank = 0;
    for (const auto& rec : g.records) {
      const auto& d = rec.record.date_published;
      fmt::print("  {:>3}. {:7.3f}  {}{}  <{}>\n", ++rank, rec.score, rec.record.title,
                 d ? fmt::format(" ({})", d->year) : std::string(),
                 fmt::join(rec.record.source_ids, ","));
    }
  }
}

int run_search(const Options& o) {
  auto gw = gateway::Gateway::from_config(gateway_config(o));
  print_search(gw->search(o.query));
  return 0;
}

int run_chat(const Options& o) {
  auto gw = gateway::Gateway::from_config(gateway_config(o));
  const auto result = gw->search(o.query);
  print_search(result);
  fmt::print("\nAsk questions, one per line. An empty line ends the chat.\n");
  std::string line;
  while (true) {
    fmt::print("> ");
    std::fflush(stdout);
    if (!std::getline(std::cin, line) || line.empty()) break;
    try {
      const auto reply = gw->chat(result.session_id, line);
      fmt::print("{}\n", reply.answer);
      for (const auto& s : reply.supporting) fmt::print("  - {} <{}>\n", s.title, fmt::join(s.sources, ","));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPromptTooLarge && e.code() != ErrorCode::kEmptyQuestion) throw;
      fmt::print(stderr, "{}: {}\n", code_name(e.code()), e.what());
    }
  }
  return 0;
}

int run_serve(const Options& o) {
  auto cfg = gateway_config(o);
  if (!o.host.empty()) cfg.host = o.host;
  if (o.port >= 0) cfg.port = o.port;
  auto gw = gateway::Gateway::from_config(cfg);
  api::ApiServer server(*gw);
  const int port = server.bind(cfg.host, cfg.port);
  spdlog::info("listening on http://{}:{}", cfg.host, port);
  server.serve();
  return 0;
}

void emit(const Options& o, const std::string& file_name, const std::string& content) {
  if (o.output.empty()) {
    fmt::print("{}", content);
    if (!content.empty() && content.back() != '\n') fmt::print("\n");
    return;
  }
  const std::filesystem::path out(o.output);
  io::write_file(out / file_name, content);
  spdlog::info("wrote {}", (out / file_name).string());
}

// Fresh session per item so no history leaks between questions.
evalkit::AnswerFn session_answerer(std::shared_ptr<const retriever::KnowledgeBase> kb,
                                   const std::vector<taxonomy::ScholarlyRecord>& records,
                                   const config::ServiceConfig& cfg, const embedding::EmbeddingProvider& embedder,
                                   const llm::LlmProvider& llm) {
  return [kb, &records, &cfg, &embedder, &llm](const evalkit::QaItem& item) {
    generator::ChatSession session("eval", item.query.value_or(""), kb, records, cfg.generator.history_capacity);
    return session.answer(item.question, cfg.retriever, embedder, llm, cfg.generator).text;
  };
}

void write_reports(const Options& o, const std::vector<evalkit::QaItem>& items, const evalkit::DatasetReport& report) {
  if (o.output.empty()) {
    fmt::print("{}\n", evalkit::report_summary_json(report));
    return;
  }
  std::string dataset;
  for (const auto& item : items) dataset += evalkit::to_json_line(item) + "\n";
  emit(o, "dataset.jsonl", dataset);
  emit(o, "summary.json", evalkit::report_summary_json(report) + "\n");
  emit(o, "items.csv", evalkit::report_items_csv(report));
}

int run_eval_ai_qa(const Options& o) {
  if (o.input.empty()) throw UsageError("eval ai-qa needs --input <corpus directory>");
  const auto cfg = load_config(o);
  const auto embedder = config::make_embedder(cfg.embedder);
  const auto llm = config::make_llm(cfg.llm);
  const auto records = evalkit::load_record_corpus(o.input, cfg.dedup);
  auto kb = std::make_shared<const retriever::KnowledgeBase>(retriever::KnowledgeBase::build(records, *embedder));

  evalkit::StubQuestionWriter stub_writer;
  const llm::LlmProvider& writer = o.provider == "remote" ? *llm : static_cast<const llm::LlmProvider&>(stub_writer);
  const auto build = evalkit::build_ai_qa(*kb, writer, o.seed,
                                          o.query.empty() ? std::nullopt : std::optional<std::string>(o.query));
  spdlog::info("{} documents, {} clusters, {} items, {} malformed replies", kb->size(), build.clusters,
               build.items.size(), build.malformed);
  const auto report = evalkit::evaluate_dataset(build.items, session_answerer(kb, records, cfg, *embedder, *llm),
                                                *embedder);
  write_reports(o, build.items, report);
  return 0;
}

int run_eval_comparison(const Options& o) {
  if (o.input.empty() || o.corpus.empty()) {
    throw UsageError("eval comparison-qa needs --input <comparison.json> and --corpus <directory>");
  }
  const auto cfg = load_config(o);
  const auto embedder = config::make_embedder(cfg.embedder);
  const auto llm = config::make_llm(cfg.llm);
  const auto records = evalkit::load_record_corpus(o.corpus, cfg.dedup);
  std::set<std::string> titles;
  for (const auto& r : records) titles.insert(r.title);
  const auto comparisons = evalkit::comparisons_from_json(io::read_file(o.input));
  const auto items = evalkit::build_comparison_qa(comparisons, titles);
  auto kb = std::make_shared<const retriever::KnowledgeBase>(retriever::KnowledgeBase::build(records, *embedder));
  const auto report = evalkit::evaluate_dataset(items, session_answerer(kb, records, cfg, *embedder, *llm), *embedder);
  write_reports(o, items, report);
  return 0;
}

int run_eval_sweep(const Options& o) {
  if (o.input.empty()) throw UsageError("eval sweep needs --input <corpus directory>");
  const auto cfg = load_config(o);
  const auto embedder = config::make_embedder(cfg.embedder);
  const auto records = evalkit::load_record_corpus(o.input, cfg.dedup);
  if (records.empty()) throw Error(ErrorCode::kEmptyCorpus, "no records under " + o.input);
  std::vector<std::string> docs;
  for (const auto& r : records) docs.push_back(retriever::flatten_record(r));
  const std::string query = o.query.empty() ? records.front().title : o.query;
  evalkit::SweepOptions options;
  options.bm25 = cfg.bm25;
  if (o.bm25_raw) options.bm25_mode = evalkit::Bm25SweepMode::kNormalizedScore;
  emit(o, "sweep.csv", evalkit::sweep_csv(evalkit::relevancy_sweep(query, docs, *embedder, options)));
  return 0;
}

int run_eval_perf(const Options& o) {
  if (o.input.empty()) throw UsageError("eval perf needs --input <telemetry log>");
  std::vector<evalkit::LogEntry> log;
  for (const auto& line : io::read_lines(o.input)) log.push_back(evalkit::log_entry_from_json(line));
  emit(o, "perf.json", evalkit::perf_stats_json(evalkit::perf_stats(log)) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated scholarly search gateway with conversational QA"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "Service config JSON");
  app.add_option("--registry", o.registry_path, "Source registry JSON (overrides the config)");
  app.add_option("--provider", o.provider, "LLM provider: stub or remote")->check(CLI::IsMember({"stub", "remote"}));
  app.add_flag("-v,--verbose", o.verbose, "Debug logging");

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--host", o.host, "Listen address");
  serve->add_option("--port", o.port, "Listen port (0 picks one)");

  auto* search = app.add_subcommand("search", "One-shot federated search");
  search->add_option("query", o.query, "Search query")->required();

  auto* chat = app.add_subcommand("chat", "Search, then chat over the results on stdin");
  chat->add_option("query", o.query, "Search query")->required();

  auto* eval = app.add_subcommand("eval", "Evaluation drivers");
  eval->require_subcommand(1);
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--input", o.input, "Input path");
    cmd->add_option("--output", o.output, "Output directory (stdout when absent)");
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--provider", o.provider, "LLM provider: stub or remote")
        ->check(CLI::IsMember({"stub", "remote"}));
    cmd->add_option("--config", o.config_path, "Service config JSON");
  };
  auto* ai_qa = eval->add_subcommand("ai-qa", "Build and score the clustered AI-QA set over a corpus directory");
  add_common(ai_qa);
  ai_qa->add_option("--query", o.query, "Query label stored with each item");
  auto* comparison = eval->add_subcommand("comparison-qa", "Build and score comparison questions");
  add_common(comparison);
  comparison->add_option("--corpus", o.corpus, "Corpus directory standing in for retrieved results");
  auto* sweep = eval->add_subcommand("sweep", "Relevancy threshold sweep over a corpus directory");
  add_common(sweep);
  sweep->add_option("--query", o.query, "Sweep query (default: first record title)");
  sweep->add_flag("--bm25-raw", o.bm25_raw, "Use max-normalized raw BM25+ scores");
  auto* perf = eval->add_subcommand("perf", "Latency statistics over a telemetry log");
  add_common(perf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("fedqa"));
  spdlog::set_level(o.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*serve) return run_serve(o);
    if (*search) return run_search(o);
    if (*chat) return run_chat(o);
    if (*ai_qa) return run_eval_ai_qa(o);
    if (*comparison) return run_eval_comparison(o);
    if (*sweep) return run_eval_sweep(o);
    if (*perf) return run_eval_perf(o);
  } catch (const UsageError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return kUsage;
  } catch (const Error& e) {
    fmt::print(stderr, "{}: {}\n", code_name(e.code()), e.what());
    return e.code() == ErrorCode::kProviderFailure ? kProvider : kUsage;
  }
  return kUsage;
}
