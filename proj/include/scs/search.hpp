#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "scs/parallel.hpp"
#include "scs/plan.hpp"
#include "scs/shard.hpp"

namespace scs {

struct SearchResult {
  std::string repo_id;
  std::string revision_id;
  std::string path;
  std::uint32_t line_start = 1;  // 1-based, inclusive
  std::uint32_t line_end = 1;
  double score = 0.0;
  std::string fragment;

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

// Total order: score descending, then path, line, repo, revision.
bool result_before(const SearchResult& a, const SearchResult& b);

struct SearchStats {
  std::size_t files_considered = 0;  // survived the trigram pre-filter
  std::size_t files_matched = 0;
};

inline constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

// Line-level matches of `query` in `shard`.
//
// And/Or are decided per file: a content atom (term, regex, sym:) is true for
// a file when it hits at least one line. Every line of a matching file that
// an atom hits is returned, scored with score_match. Terms match substrings
// of a line, regexes are searched within a line, sym: atoms match the name of
// a symbol declared in the file (terms by whole-name equality). repo:/rev:
// compare exactly against the shard identity, file: is a substring of the
// path.
//
// Candidate files come from the trigram plan and are then verified exactly,
// so results equal a full scan. Parallel verifies files on an OpenMP team;
// Serial is the reference path. Output is identical under either.
std::vector<SearchResult> search_shard(const Shard& shard, const CompiledQuery& query,
                                       std::size_t limit = kNoLimit,
                                       Execution execution = Execution::Parallel,
                                       SearchStats* stats = nullptr);

enum class Scope { No, Maybe };

// Whether `tree` can match anything in a shard with this identity, looking
// only at repo:/rev: filters.
Scope shard_scope(const QueryNode& tree, const ShardMeta& meta);

// Arguments of every filter of `kind` in the tree.
std::vector<std::string> filter_arguments(const QueryNode& tree, FilterKind kind);

}  // namespace scs
