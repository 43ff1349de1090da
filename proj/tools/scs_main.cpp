// scs: index, serve, retrieve and hitrate commands.
#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <spdlog/spdlog.h>

#include "scs/error.hpp"
#include "scs/harness.hpp"
#include "scs/service.hpp"

namespace {

scs::SearchService* g_service = nullptr;

void on_signal(int) {
  if (g_service != nullptr) g_service->stop();
}

struct RetrieveFlags {
  std::string dataset;
  std::string server = "http://127.0.0.1:6070";
  std::string mode = "single";
  std::string out;
  std::string field_map;
  std::string revision_order;
  std::string timings;
  bool resume = false;
  long timeout_ms = 200;
  unsigned retries = 3;
  std::size_t max_results = 50;
  long model_max = 8192;
  long reserved = 256;
  long per_file = 0;
  std::size_t top_k = 5;
  std::size_t in_flight = 4;
  std::string tokenizer;
};

void add_common(CLI::App* cmd, RetrieveFlags& f) {
  cmd->add_option("--dataset", f.dataset, "JSONL dataset")->required()->check(CLI::ExistingFile);
  cmd->add_option("--server", f.server, "search service base URL");
  cmd->add_option("--field-map", f.field_map, "dataset key overrides, e.g. repo=repository,id=task_id");
  cmd->add_option("--max-revision-order", f.revision_order,
                  "file of '<repo> <revision>' lines, oldest first; drops results from later revisions")
      ->check(CLI::ExistingFile);
  cmd->add_option("--timeout-ms", f.timeout_ms, "per-request timeout")->check(CLI::PositiveNumber);
  cmd->add_option("--retries", f.retries, "retries on overload or timeout");
  cmd->add_option("--max-results", f.max_results, "results per query")->check(CLI::PositiveNumber);
  cmd->add_option("--in-flight", f.in_flight, "points processed concurrently")->check(CLI::PositiveNumber);
}

scs::RetrieveOptions to_options(const RetrieveFlags& f) {
  scs::RetrieveOptions o;
  o.dataset = f.dataset;
  o.out = f.out;
  if (!f.field_map.empty()) o.fields = scs::parse_field_map(f.field_map);
  o.mode = f.mode == "cross" ? scs::ScopeMode::CrossShard : scs::ScopeMode::SingleShard;
  o.resume = f.resume;
  o.ladder.timeout = std::chrono::milliseconds(f.timeout_ms);
  o.ladder.max_retries = f.retries;
  o.ladder.max_results = f.max_results;
  o.model_max = f.model_max;
  o.reserved_buffer = f.reserved;
  if (f.per_file > 0) o.per_file_budget = f.per_file;
  o.top_k = f.top_k;
  o.tokenizer_command = f.tokenizer;
  o.in_flight = f.in_flight;
  if (!f.revision_order.empty()) o.revision_order = scs::RevisionOrder::load(f.revision_order);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trigram code search and retrieval harness"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off");

  scs::IndexOptions index;
  std::string index_dataset, index_repos, index_out, index_fields;
  bool serial = false;
  auto* cmd_index = app.add_subcommand("index", "build one shard per (repo, revision) of a dataset");
  cmd_index->add_option("--dataset", index_dataset, "JSONL dataset")->required()->check(CLI::ExistingFile);
  cmd_index->add_option("--repos", index_repos, "root of <repo>/<revision>/ trees")->required();
  cmd_index->add_option("--out", index_out, "shard output directory")->required();
  cmd_index->add_option("--field-map", index_fields, "dataset key overrides");
  cmd_index->add_flag("--serial", serial, "single-threaded indexing");

  std::string shard_dir, host = "127.0.0.1";
  int port = 6070;
  std::size_t max_concurrency = 0;
  auto* cmd_serve = app.add_subcommand("serve", "serve shards over HTTP");
  cmd_serve->add_option("--shards", shard_dir, "shard directory")->required();
  cmd_serve->add_option("--port", port, "listen port (0 picks one)");
  cmd_serve->add_option("--host", host, "bind address");
  cmd_serve->add_option("--max-concurrency", max_concurrency,
                        "concurrent searches before queueing (default SCS_MAX_CONCURRENCY or 2 x cores)");

  RetrieveFlags rf;
  auto* cmd_retrieve = app.add_subcommand("retrieve", "retrieve context for every dataset point");
  add_common(cmd_retrieve, rf);
  cmd_retrieve->add_option("--mode", rf.mode, "single or cross")->check(CLI::IsMember({"single", "cross"}));
  cmd_retrieve->add_option("--out", rf.out, "output JSONL")->required();
  cmd_retrieve->add_flag("--resume", rf.resume, "continue from <out>.ckpt");
  cmd_retrieve->add_option("--model-max", rf.model_max, "model context size M in tokens");
  cmd_retrieve->add_option("--reserved", rf.reserved, "generation buffer B in tokens");
  cmd_retrieve->add_option("--per-file", rf.per_file, "per-file budget R (default T/2)");
  cmd_retrieve->add_option("--top-k", rf.top_k, "snippets admitted at most")->check(CLI::PositiveNumber);
  cmd_retrieve->add_option("--tokenizer-cmd", rf.tokenizer,
                           "command reading text on stdin and printing a token count");

  RetrieveFlags hf;
  auto* cmd_hitrate = app.add_subcommand("hitrate", "single- vs cross-shard hit rate");
  add_common(cmd_hitrate, hf);
  cmd_hitrate->add_option("--timings", hf.timings, "write per-point timings as CSV");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*cmd_index) {
      index.dataset = index_dataset;
      index.repos = index_repos;
      index.out = index_out;
      if (!index_fields.empty()) index.fields = scs::parse_field_map(index_fields);
      index.execution = serial ? scs::Execution::Serial : scs::Execution::Parallel;
      return scs::run_index(index, std::cout).exit_code;
    }
    if (*cmd_serve) {
      auto shards = std::make_shared<const scs::ShardSet>(scs::ShardSet::load_directory(shard_dir));
      scs::ServiceConfig config;
      config.max_concurrency = max_concurrency;
      scs::SearchService service(shards, config);
      const int bound = service.bind(host, port);
      spdlog::info("serving {} shards on http://{}:{}", shards->size(), host, bound);
      std::cout << "listening on " << host << ":" << bound << std::endl;
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      service.run();
      g_service = nullptr;
      return 0;
    }
    if (*cmd_retrieve) {
      const auto summary = scs::run_retrieve(to_options(rf), scs::http_backend(rf.server));
      std::cerr << summary.written << "/" << summary.records << " points written, " << summary.hits
                << " hits, " << summary.errors << " errors, " << summary.wall.count() << " ms\n";
      if (summary.unreachable) std::cerr << "search service unreachable; rerun with --resume\n";
      return summary.exit_code;
    }
    if (*cmd_hitrate) {
      const auto report = scs::run_hitrate(to_options(hf), scs::http_backend(hf.server), std::cout);
      if (!hf.timings.empty()) {
        std::ofstream csv(hf.timings);
        csv << "id,single_hit,single_us,cross_hit,cross_us\n";
        for (const auto& p : report.points) {
          csv << p.id << ',' << p.single_hit << ',' << p.single_time.count() << ',' << p.cross_hit << ','
              << p.cross_time.count() << '\n';
        }
      }
      return report.exit_code;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
