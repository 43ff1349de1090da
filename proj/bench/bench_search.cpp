// Serial reference vs OpenMP kernels for indexing and search.
#include <benchmark/benchmark.h>

#include <map>
#include <spdlog/spdlog.h>

#include "generators.hpp"
#include "scs/plan.hpp"
#include "scs/search.hpp"
#include "scs/shard_set.hpp"

namespace {

using scs::Execution;

const std::vector<scs::SourceFile>& corpus(std::size_t lines) {
  static std::map<std::size_t, std::vector<scs::SourceFile>> cache;
  auto it = cache.find(lines);
  if (it == cache.end()) it = cache.emplace(lines, scs::testing::synthetic_project(lines, 7)).first;
  return it->second;
}

const scs::Shard& shard() {
  static const scs::Shard s = scs::build_shard("bench", "r1", corpus(100000));
  return s;
}

void BM_BuildShard(benchmark::State& state, Execution exec) {
  const auto& files = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto s = scs::build_shard("bench", "r1", files, {0, exec});
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

const char* const kQueries[] = {
    "loadUser",                    // many candidates
    "\"parseConfig3\"",            // case-sensitive phrase
    "sym:renderCache",             // symbol filter
    "/merge(Order|Index)[0-9]+/",  // regex with alternation
    "flushToken or closeSession",  // or
    "zzz_not_there",               // no trigram hits
};

void BM_SearchShard(benchmark::State& state, Execution exec) {
  const auto query = scs::compile_query(kQueries[state.range(0)]);
  const auto& s = shard();
  for (auto _ : state) {
    auto r = scs::search_shard(s, query, 50, exec);
    benchmark::DoNotOptimize(r);
  }
  state.SetLabel(kQueries[state.range(0)]);
}

void BM_ShardSetCross(benchmark::State& state, Execution exec) {
  static const auto set = [] {
    std::vector<scs::Shard> shards;
    for (int r = 0; r < 4; ++r) {
      shards.push_back(scs::build_shard("bench", "r" + std::to_string(r), scs::testing::synthetic_project(25000, r)));
    }
    return scs::ShardSet(std::move(shards));
  }();
  for (auto _ : state) {
    auto r = set.search({"repo:bench loadUser", 50, {}}, exec);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_BuildShard, serial, Execution::Serial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BuildShard, parallel, Execution::Parallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SearchShard, serial, Execution::Serial)->DenseRange(0, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_SearchShard, parallel, Execution::Parallel)->DenseRange(0, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_ShardSetCross, serial, Execution::Serial)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_ShardSetCross, parallel, Execution::Parallel)->Unit(benchmark::kMicrosecond);

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
