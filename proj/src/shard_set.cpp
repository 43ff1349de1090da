#include "scs/shard_set.hpp"

#include <algorithm>
#include <chrono>
#include <spdlog/spdlog.h>

#include "scs/error.hpp"
#include "scs/plan.hpp"
#include "scs/search.hpp"
#include "scs/shard_io.hpp"

namespace scs {

namespace {

bool identity_less(const std::shared_ptr<const Shard>& a, const std::shared_ptr<const Shard>& b) {
  return std::tie(a->meta().repo_id, a->meta().revision_id) <
         std::tie(b->meta().repo_id, b->meta().revision_id);
}

}  // namespace

ShardSet::ShardSet(std::vector<Shard> shards) {
  for (auto& s : shards) shards_.push_back(std::make_shared<const Shard>(std::move(s)));
  std::stable_sort(shards_.begin(), shards_.end(), identity_less);
  auto dup = [](const auto& a, const auto& b) {
    if (a->meta().repo_id == b->meta().repo_id && a->meta().revision_id == b->meta().revision_id) {
      spdlog::warn("duplicate shard {}@{} ignored", b->meta().repo_id, b->meta().revision_id);
      return true;
    }
    return false;
  };
  shards_.erase(std::unique(shards_.begin(), shards_.end(), dup), shards_.end());
}

ShardSet ShardSet::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error("shard directory does not exist: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".scs") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Shard> shards;
  shards.reserve(files.size());
  for (const auto& f : files) shards.push_back(load_shard(f));
  spdlog::info("loaded {} shards from {}", shards.size(), dir.string());
  return ShardSet(std::move(shards));
}

bool ShardSet::has_repo(const std::string& repo_id) const {
  return std::any_of(shards_.begin(), shards_.end(),
                     [&](const auto& s) { return s->meta().repo_id == repo_id; });
}

const Shard* ShardSet::find(const std::string& repo_id, const std::string& revision_id) const {
  auto it = std::lower_bound(shards_.begin(), shards_.end(), std::tie(repo_id, revision_id),
                             [](const auto& s, const auto& key) {
                               return std::tie(s->meta().repo_id, s->meta().revision_id) < key;
                             });
  if (it == shards_.end() || (*it)->meta().repo_id != repo_id ||
      (*it)->meta().revision_id != revision_id) {
    return nullptr;
  }
  return it->get();
}

SearchResponse ShardSet::search(const SearchRequest& request, Execution execution) const {
  const auto started = std::chrono::steady_clock::now();
  const auto query = compile_query(request.query);
  for (const auto& repo : filter_arguments(query.tree, FilterKind::Repo)) {
    if (!has_repo(repo)) throw UnknownRepo(repo);
  }

  SearchResponse response;
  for (const auto& shard : shards_) {
    if (shard_scope(query.tree, shard->meta()) == Scope::No) continue;
    SearchStats stats;
    auto hits = search_shard(*shard, query, request.max_results, execution, &stats);
    response.stats.files_considered += stats.files_considered;
    response.stats.files_matched += stats.files_matched;
    ++response.stats.shards_searched;
    response.results.insert(response.results.end(), std::make_move_iterator(hits.begin()),
                            std::make_move_iterator(hits.end()));
  }
  std::sort(response.results.begin(), response.results.end(), result_before);
  if (response.results.size() > request.max_results) response.results.resize(request.max_results);
  response.stats.duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return response;
}

std::optional<std::string> ShardSet::fetch(const std::string& repo_id, const std::string& revision_id,
                                           const std::string& path) const {
  const auto* shard = find(repo_id, revision_id);
  if (shard == nullptr) return std::nullopt;
  const auto idx = shard->find_file(path);
  if (idx < 0) return std::nullopt;
  return shard->files()[static_cast<std::size_t>(idx)].content;
}

}  // namespace scs
