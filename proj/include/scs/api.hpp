#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "scs/search.hpp"

namespace scs {

struct SearchRequest {
  std::string query;
  std::size_t max_results = 50;
  std::optional<std::chrono::milliseconds> timeout_hint;
};

struct ResponseStats {
  std::size_t files_considered = 0;
  std::size_t files_matched = 0;
  double duration_ms = 0.0;
  std::size_t shards_searched = 0;
};

struct SearchResponse {
  std::vector<SearchResult> results;  // score descending
  ResponseStats stats;
  bool overloaded = false;
};

// Read access to file contents of indexed revisions.
class ContentSource {
 public:
  virtual ~ContentSource() = default;
  virtual std::optional<std::string> fetch(const std::string& repo_id, const std::string& revision_id,
                                           const std::string& path) const = 0;
};

}  // namespace scs
