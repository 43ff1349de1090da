#include <doctest.h>

#include <httplib.h>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "scs/error.hpp"
#include "scs/harness.hpp"
#include "scs/service.hpp"
#include "scs/shard_io.hpp"

using namespace scs;
using namespace scs::testing;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

RetrieveOptions options_for(const fs::path& dataset, const fs::path& out, ScopeMode mode) {
  RetrieveOptions o;
  o.dataset = dataset;
  o.out = out;
  o.mode = mode;
  o.ladder.backoff = {};
  return o;
}

std::shared_ptr<const ShardSet> shared(const RepoTree& repos) {
  return std::make_shared<const ShardSet>(shard_set_of(repos));
}

int run_cli(const std::string& args) {
  const int rc = std::system((std::string(SCS_CLI_PATH) + " " + args).c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::size_t count_files(const fs::path& dir, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ext;
  return n;
}

}  // namespace

TEST_CASE("dataset parsing") {
  std::istringstream in(
      "{\"id\":\"a\",\"repo\":\"r\",\"revision\":\"v\",\"path\":\"x.kt\",\"prefix\":\"p\",\"suffix\":\"s\"}\n"
      "\n"
      "{\"id\":7,\"repo\":\"r\",\"revision\":3,\"path\":\"y.py\",\"prefix\":\"\",\"suffix\":\"\",\"extra\":1}\n");
  const auto points = parse_dataset(in);
  REQUIRE(points.size() == 2);
  CHECK(points[0].id == "a");
  CHECK(points[0].prefix == "p");
  CHECK(points[1].id == "7");
  CHECK(points[1].revision_id == "3");

  std::istringstream dup("{\"id\":\"a\",\"repo\":\"r\",\"revision\":\"v\",\"path\":\"x\",\"prefix\":\"\",\"suffix\":\"\"}\n"
                         "{\"id\":\"a\",\"repo\":\"r\",\"revision\":\"v\",\"path\":\"x\",\"prefix\":\"\",\"suffix\":\"\"}\n");
  CHECK_THROWS_AS(parse_dataset(dup), Error);
  std::istringstream broken("{\"id\":");
  CHECK_THROWS_AS(parse_dataset(broken), Error);
  std::istringstream missing("{\"id\":\"a\"}");
  CHECK_THROWS_AS(parse_dataset(missing), Error);

  const auto map = parse_field_map("repo=repository,id=task_id");
  CHECK(map.repo == "repository");
  CHECK(map.id == "task_id");
  CHECK(map.path == "path");
  CHECK_THROWS_AS(parse_field_map("colour=x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_field_map("repo"), std::invalid_argument);
  std::istringstream renamed("{\"task_id\":\"t\",\"repository\":\"r\",\"revision\":\"v\",\"path\":\"x\","
                             "\"prefix\":\"\",\"suffix\":\"\"}");
  CHECK(parse_dataset(renamed, map).at(0).repo_id == "r");
}

TEST_CASE("revision order guard") {
  std::istringstream in("proj r1\nproj r2\nproj r3\nother main\n");
  const auto order = RevisionOrder::parse(in);
  CHECK(order.allows("proj", "r2", "r1"));
  CHECK(order.allows("proj", "r2", "r2"));
  CHECK_FALSE(order.allows("proj", "r2", "r3"));
  CHECK_FALSE(order.allows("proj", "r2", "r9"));
  CHECK(order.allows("proj", "r9", "r3"));
  CHECK(order.allows("unlisted", "a", "b"));

  // With the guard, cross mode cannot reach the r1-only identifiers from r0.
  auto f = hitrate_fixture();
  for (auto& p : f.points) p.revision_id = "r0";
  f.repos[{"proj", "r0"}] = {{"keep.txt", "nothing here\n", Language::Other}};
  TempDir dir;
  write_dataset(dir / "data.jsonl", {f.points[8]});
  std::istringstream order_text("proj r0\nproj r1\nproj r2\n");
  auto opts = options_for(dir / "data.jsonl", dir / "out.jsonl", ScopeMode::CrossShard);
  auto set = shared(f.repos);
  CHECK(run_retrieve(opts, local_backend(set)).hits == 1);
  opts.revision_order = RevisionOrder::parse(order_text);
  CHECK(run_retrieve(opts, local_backend(set)).hits == 0);
}

TEST_CASE("index command") {
  TempDir dir;
  RepoTree repos;
  repos[{"alpha", "r1"}] = {{"a.kt", "class A\n", Language::Kotlin}, {"sub/b.py", "def b(): pass\n", Language::Python}};
  repos[{"alpha", "r2"}] = {{"a.kt", "class A2\n", Language::Kotlin}};
  write_repos(dir / "repos", repos);
  write_file(dir / "repos/alpha/r1/.git/HEAD", "ref\n");
  write_dataset(dir / "data.jsonl", {{"1", "alpha", "r1", "a.kt", "", ""},
                                     {"2", "alpha", "r1", "sub/b.py", "", ""},
                                     {"3", "alpha", "r2", "a.kt", "", ""}});

  IndexOptions opts{dir / "data.jsonl", dir / "repos", dir / "shards", {}, Execution::Parallel};
  std::ostringstream report;
  auto summary = run_index(opts, report);
  CHECK(summary.exit_code == kExitOk);
  CHECK(summary.shards_written == 2);
  CHECK(summary.revisions_per_repo.at("alpha") == 2);
  CHECK(summary.files_per_repo.at("alpha") == 3);
  CHECK(count_files(dir / "shards", ".scs") == 2);
  CHECK(report.str().find("alpha") != std::string::npos);

  const auto set = ShardSet::load_directory(dir / "shards");
  REQUIRE(set.size() == 2);
  CHECK(set.shards()[0]->meta().file_count == 2);  // .git ignored
  CHECK(set.fetch("alpha", "r1", "sub/b.py") == "def b(): pass\n");

  write_dataset(dir / "empty.jsonl", {});
  opts.dataset = dir / "empty.jsonl";
  opts.out = dir / "none";
  summary = run_index(opts, report);
  CHECK(summary.exit_code == kExitOk);
  CHECK(summary.shards_written == 0);

  write_dataset(dir / "bad.jsonl", {{"1", "alpha", "r1", "a.kt", "", ""}, {"2", "alpha", "gone", "a.kt", "", ""}});
  opts.dataset = dir / "bad.jsonl";
  opts.out = dir / "partial";
  summary = run_index(opts, report);
  CHECK(summary.exit_code == kExitPartial);
  CHECK(summary.shards_written == 1);
  REQUIRE(summary.skipped.size() == 1);
  CHECK(summary.skipped[0].second == "gone");

  CHECK(read_tree(dir / "repos/alpha/r1").size() == 2);
  CHECK(shard_file_name("a/b", "v 1") != shard_file_name("a_b", "v_1"));
  CHECK(shard_file_name("a/b", "v 1").find('/') == std::string::npos);
}

TEST_CASE("hitrate on the constructed fixture") {
  const auto f = hitrate_fixture();
  for (const auto& p : f.points) {
    const bool expect_single = p.id != "p8" && p.id != "p9";
    CAPTURE(p.id);
    CHECK(grep_hit(f, p, false) == expect_single);
    CHECK(grep_hit(f, p, true));
  }
  TempDir dir;
  write_dataset(dir / "data.jsonl", f.points);
  std::ostringstream out;
  const auto report = run_hitrate(options_for(dir / "data.jsonl", "", ScopeMode::SingleShard),
                                  local_backend(shared(f.repos)), out);
  CHECK(report.single.hit == 8);
  CHECK(report.single.miss == 2);
  CHECK(report.cross.hit == 10);
  CHECK(report.cross.miss == 0);
  CHECK(report.cross_dominates);
  CHECK(report.exit_code == kExitOk);
  REQUIRE(report.points.size() == 10);
  for (const auto& p : report.points) CHECK(p.single_hit == grep_hit(f, f.points[&p - report.points.data()], false));
  CHECK(out.str().find("cross >= single: yes") != std::string::npos);
  std::size_t wins = 0;
  for (const auto& [name, n] : report.cross.wins) wins += n;
  CHECK(wins == 10);
}

TEST_CASE("hitrate all-miss and random fixtures") {
  TempDir dir;
  auto f = hitrate_fixture();
  for (auto& p : f.points) {
    p.path = "src/New" + p.id + ".kt";
    p.prefix = "val qqunseen" + p.id + " = 1\n";
    p.suffix = "";
  }
  write_dataset(dir / "data.jsonl", f.points);
  std::ostringstream out;
  auto report = run_hitrate(options_for(dir / "data.jsonl", "", ScopeMode::SingleShard),
                            local_backend(shared(f.repos)), out);
  CHECK(report.single.hit == 0);
  CHECK(report.cross.hit == 0);
  CHECK(report.single.miss == 10);

  Rng rng(77);
  for (int round = 0; round < 10; ++round) {
    const auto g = random_harness_fixture(rng, 15);
    write_dataset(dir / "rand.jsonl", g.points);
    report = run_hitrate(options_for(dir / "rand.jsonl", "", ScopeMode::SingleShard), local_backend(shared(g.repos)),
                         out);
    CHECK(report.single.hit + report.single.miss == 15);
    CHECK(report.cross.hit + report.cross.miss == 15);
    CHECK(report.cross.hit >= report.single.hit);
    for (const auto& p : report.points) CHECK((!p.single_hit || p.cross_hit));
  }
}

TEST_CASE("retrieve output, determinism and totality") {
  const auto f = hitrate_fixture();
  auto points = f.points;
  points.push_back({"blank", "proj", "r2", "src/Feature0.kt", "", ""});
  points.push_back({"noshard", "proj", "r7", "src/X.kt", "val y = compute0(1)\n", ""});
  TempDir dir;
  write_dataset(dir / "data.jsonl", points);
  const auto set = shared(f.repos);

  auto opts = options_for(dir / "data.jsonl", dir / "a.jsonl", ScopeMode::SingleShard);
  auto summary = run_retrieve(opts, local_backend(set));
  CHECK(summary.exit_code == kExitOk);
  CHECK(summary.records == points.size());
  CHECK(summary.written == points.size());
  const auto lines = read_lines(dir / "a.jsonl");
  REQUIRE(lines.size() == points.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto j = json::parse(lines[i]);
    CHECK(j["id"] == points[i].id);
    CHECK(j.contains("winning_variant"));
    CHECK(j.contains("total_tokens"));
    if (!j["hit"].get<bool>()) {
      CHECK(j["context"] == "");
      CHECK(j["winning_variant"].is_null());
    } else {
      CHECK(j["winning_variant"].is_string());
    }
  }
  CHECK(json::parse(lines[0])["hit"] == true);
  CHECK(json::parse(lines[0])["context"].get<std::string>().find("// src/Feature0.kt:") == 0);
  CHECK(json::parse(lines[8])["hit"] == false);
  CHECK(json::parse(lines[10])["hit"] == true);  // blank point mines the window around line 1
  const auto first = read_file(dir / "a.jsonl");

  opts.in_flight = 1;
  opts.out = dir / "b.jsonl";
  run_retrieve(opts, local_backend(set));
  CHECK(read_file(dir / "b.jsonl") == first);
  opts.in_flight = 8;
  opts.out = dir / "c.jsonl";
  run_retrieve(opts, local_backend(set));
  CHECK(read_file(dir / "c.jsonl") == first);

  opts.mode = ScopeMode::CrossShard;
  opts.out = dir / "cross.jsonl";
  summary = run_retrieve(opts, local_backend(set));
  CHECK(json::parse(read_lines(dir / "cross.jsonl")[8])["hit"] == true);
  CHECK(summary.hits >= 10);
}

TEST_CASE("retrieve resume after interruption") {
  const auto f = hitrate_fixture();
  TempDir dir;
  write_dataset(dir / "data.jsonl", f.points);
  const auto set = shared(f.repos);
  auto opts = options_for(dir / "data.jsonl", dir / "full.jsonl", ScopeMode::CrossShard);
  run_retrieve(opts, local_backend(set));
  const auto full = read_lines(dir / "full.jsonl");
  json ck = json::parse(read_file(dir / "full.jsonl.ckpt"));
  CHECK(ck["completed"] == 10);
  CHECK(ck["last_id"] == "p9");

  // Four lines done plus a torn fifth.
  std::string partial;
  for (int i = 0; i < 4; ++i) partial += full[i] + "\n";
  partial += full[4].substr(0, 10);
  write_file(dir / "part.jsonl", partial);
  write_file(dir / "part.jsonl.ckpt", json{{"completed", 4}, {"last_id", "p3"}}.dump());
  opts.out = dir / "part.jsonl";
  opts.resume = true;
  auto summary = run_retrieve(opts, local_backend(set));
  CHECK(summary.exit_code == kExitOk);
  CHECK(read_lines(dir / "part.jsonl") == full);

  write_file(dir / "part.jsonl.ckpt", json{{"completed", 4}, {"last_id", "nope"}}.dump());
  CHECK_THROWS_AS(run_retrieve(opts, local_backend(set)), Error);
}

TEST_CASE("unreachable server aborts with a resumable checkpoint") {
  const auto f = hitrate_fixture();
  TempDir dir;
  write_dataset(dir / "data.jsonl", f.points);
  const auto set = shared(f.repos);

  int port;
  {
    SearchService probe(std::make_shared<const ShardSet>());
    port = probe.bind("127.0.0.1", 0);
  }
  const auto url = "http://127.0.0.1:" + std::to_string(port);
  auto opts = options_for(dir / "data.jsonl", dir / "out.jsonl", ScopeMode::SingleShard);
  auto summary = run_retrieve(opts, http_backend(url));
  CHECK(summary.exit_code == kExitUnreachable);
  CHECK(summary.unreachable);
  CHECK(summary.written == 0);
  std::ostringstream sink;
  CHECK(run_hitrate(opts, http_backend(url), sink).exit_code == kExitUnreachable);

  SearchService service(set);
  service.bind("127.0.0.1", port);
  service.start();
  opts.resume = true;
  summary = run_retrieve(opts, http_backend(url));
  CHECK(summary.exit_code == kExitOk);
  CHECK(summary.written == 10);
  opts.resume = false;
  opts.out = dir / "local.jsonl";
  run_retrieve(opts, local_backend(set));
  CHECK(read_file(dir / "out.jsonl") == read_file(dir / "local.jsonl"));
}

TEST_CASE("command line") {
  const auto f = hitrate_fixture();
  TempDir dir;
  write_repos(dir / "repos", f.repos);
  write_dataset(dir / "data.jsonl", f.points);
  const auto quiet = " > " + (dir / "log.txt").string() + " 2>&1";

  CHECK(run_cli("index --dataset " + (dir / "data.jsonl").string() + " --repos " + (dir / "repos").string() +
                " --out " + (dir / "shards").string() + quiet) == 0);
  CHECK(count_files(dir / "shards", ".scs") == 1);  // the dataset only names r2
  CHECK(read_file(dir / "log.txt").find("proj") != std::string::npos);
  CHECK(run_cli("index --dataset " + (dir / "nope.jsonl").string() + " --repos x --out y" + quiet) != 0);
  CHECK(run_cli("frobnicate" + quiet) != 0);

  // Serve the full tree so cross mode sees r1.
  write_dataset(dir / "all.jsonl", {{"a", "proj", "r1", "x", "", ""}, {"b", "proj", "r2", "x", "", ""}});
  REQUIRE(run_cli("index --dataset " + (dir / "all.jsonl").string() + " --repos " + (dir / "repos").string() +
                  " --out " + (dir / "all") .string() + quiet) == 0);

  const auto log = dir / "serve.log";
  const auto pid_file = dir / "serve.pid";
  const auto cmd = "sh -c '" + std::string(SCS_CLI_PATH) + " serve --shards " + (dir / "all").string() +
                   " --port 0 > " + log.string() + " 2>&1 & echo $! > " + pid_file.string() + "'";
  REQUIRE(std::system(cmd.c_str()) == 0);
  int port = 0;
  for (int i = 0; i < 200 && port == 0; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
    const auto text = read_file(log);
    const auto at = text.find("listening on 127.0.0.1:");
    if (at != std::string::npos && text.find('\n', at) != std::string::npos) {
      port = std::stoi(text.substr(at + 23));
    }
  }
  REQUIRE(port > 0);
  const auto pid = std::stoi(read_file(pid_file));
  const auto url = "http://127.0.0.1:" + std::to_string(port);
  {
    httplib::Client c(url);
    auto res = c.Get("/health");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["shards"] == 2);
  }

  CHECK(run_cli("serve --shards " + (dir / "all").string() + " --port " + std::to_string(port) + quiet) == 1);

  CHECK(run_cli("hitrate --dataset " + (dir / "data.jsonl").string() + " --server " + url + " --timings " +
                (dir / "t.csv").string() + " > " + (dir / "hr.txt").string() + " 2>&1") == 0);
  const auto table = read_file(dir / "hr.txt");
  CHECK(table.find("single-shard        8       2") != std::string::npos);
  CHECK(table.find("cross-shard        10       0") != std::string::npos);
  CHECK(read_lines(dir / "t.csv").size() == 11);

  CHECK(run_cli("retrieve --dataset " + (dir / "data.jsonl").string() + " --server " + url +
                " --mode cross --out " + (dir / "r.jsonl").string() + quiet) == 0);
  CHECK(read_lines(dir / "r.jsonl").size() == 10);

  ::kill(pid, SIGTERM);
  for (int i = 0; i < 200 && ::kill(pid, 0) == 0; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(25));
  CHECK(::kill(pid, 0) != 0);

  // Empty shard directory serves zero shards.
  fs::create_directories(dir / "empty");
  CHECK(ShardSet::load_directory(dir / "empty").size() == 0);
  CHECK_THROWS_AS(ShardSet::load_directory(dir / "missing"), Error);
}
