#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scs/api.hpp"
#include "scs/language.hpp"
#include "scs/tokenizer.hpp"

namespace scs {

struct TokenBudget {
  long model_max = 0;             // M
  long reserved_buffer = 0;       // B
  long prefix_suffix_tokens = 0;
  long total_constraint = 0;      // T = M - prefix/suffix tokens - B; <= 0 means no room
  long per_file_budget = 1;       // R
  std::size_t top_k_files = 5;    // k
};

inline constexpr long kDefaultReservedBuffer = 256;
inline constexpr std::size_t kDefaultTopK = 5;

// R defaults to max(1, T / 2); an explicit R is clamped to T when T > 0.
TokenBudget compute_budget(long model_max, long reserved_buffer, std::string_view prefix,
                           std::string_view suffix, const Tokenizer& tokenizer,
                           std::optional<long> per_file_budget = std::nullopt,
                           std::size_t top_k = kDefaultTopK);

struct Snippet {
  std::string path;
  std::string repo_id;
  std::string revision_id;
  std::uint32_t line_start = 1;
  std::uint32_t line_end = 1;
  std::string text;  // lines line_start..line_end joined by '\n'
  double score = 0.0;
  std::size_t token_count = 0;
};

// Unions snippets of one file whose line ranges overlap or touch (gap <= 1)
// until no such pair remains; merged score is the maximum. Sorted by
// line_start.
std::vector<Snippet> merge_overlaps(std::vector<Snippet> snippets, const Tokenizer& tokenizer);

struct ContextBundle {
  std::string cp_id;
  std::vector<Snippet> snippets;
  std::size_t total_tokens = 0;  // tokens of `rendered`, headers included
  std::string rendered;
};

// Header line preceding each snippet in the rendered bundle.
std::string snippet_header(const Snippet& s, Language lang);

// Greedy top-k packing. Results are grouped by file; a file that fits in R
// is taken whole, otherwise its merged snippets are taken, each cut back to
// R by dropping trailing lines. Candidates are admitted in score order while
// the running total stays within T and fewer than k are admitted.
// Throws MissingFile when a result's file cannot be fetched.
ContextBundle assemble(const std::string& cp_id, const std::vector<SearchResult>& results,
                       const ContentSource& source, const TokenBudget& budget, const Tokenizer& tokenizer,
                       Language lang);

}  // namespace scs
