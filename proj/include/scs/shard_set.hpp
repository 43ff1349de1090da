#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scs/api.hpp"
#include "scs/parallel.hpp"
#include "scs/shard.hpp"

namespace scs {

// Immutable collection of loaded shards answering multi-shard searches.
// A query's repo:/rev: filters pick the shards it runs against: with rev:
// that is one shard, without it every revision of the repository.
class ShardSet final : public ContentSource {
 public:
  ShardSet() = default;
  // Duplicated (repo, revision) pairs keep the first shard.
  explicit ShardSet(std::vector<Shard> shards);

  // Loads every *.scs file of `dir` in name order.
  static ShardSet load_directory(const std::filesystem::path& dir);

  const std::vector<std::shared_ptr<const Shard>>& shards() const { return shards_; }
  std::size_t size() const { return shards_.size(); }
  bool has_repo(const std::string& repo_id) const;

  // Throws ParseError for bad syntax and UnknownRepo when a repo: filter
  // names a repository without shards.
  SearchResponse search(const SearchRequest& request, Execution execution = Execution::Serial) const;

  std::optional<std::string> fetch(const std::string& repo_id, const std::string& revision_id,
                                   const std::string& path) const override;

 private:
  const Shard* find(const std::string& repo_id, const std::string& revision_id) const;

  std::vector<std::shared_ptr<const Shard>> shards_;  // sorted by (repo, revision)
};

}  // namespace scs
