#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scs/client.hpp"
#include "scs/miner.hpp"
#include "scs/query.hpp"

namespace scs {

enum class VariantId : std::uint8_t {
  FunctionsClassesNaive,
  FunctionsClassesOr,
  FunctionsClassesTop5,
  FunctionsClassesTop4,
  FunctionsClassesTop3,
  FunctionsClassesRegex,
  NavigationNaive,
  NavigationUnpacked,
  NavigationUnpackedOr,
  NavigationUnpackedTop5,
  NavigationUnpackedTop4,
  NavigationUnpackedTop3,
  NavigationRegex,
  IdentifiersNaive,
  IdentifiersOr,
  IdentifiersTop5,
  IdentifiersTop4,
  IdentifiersTop3,
  IdentifiersRegex,
};

inline constexpr std::size_t kVariantCount = 19;

std::string_view variant_name(VariantId id);
std::optional<VariantId> parse_variant(std::string_view name);

// Most specific first: per family naive, top5..top3, regex, then the OR form.
std::span<const VariantId> canonical_order();

struct QueryVariant {
  VariantId id = VariantId::FunctionsClassesNaive;
  std::vector<std::string> terms;
  std::size_t term_count = 0;      // 0: skipped, never sent
  std::optional<QueryNode> body;   // absent iff skipped
  std::string query_text;          // rendered body, empty iff skipped
};

// One slot per id in `order`, which must be a permutation of all 19 ids
// (std::invalid_argument otherwise).
//
//   naive  AND of every family term as exact phrases
//   or     OR of every family term
//   topK   AND of the K best-ranked terms; with n < K terms it falls back to
//          top-n and is skipped when an earlier AND variant of the same
//          family already sent that term set
//   regex  OR of /\bT\b/ per term, metacharacters escaped
//
// navigation_naive and navigation_regex use whole chains, the other
// navigation variants use unpacked components.
std::vector<QueryVariant> generate_variants(const MinedTerms& mined,
                                            std::span<const VariantId> order = canonical_order());

enum class ScopeMode { SingleShard, CrossShard };

std::string_view to_string(ScopeMode m);

// Prefixes repo:<repo> (and rev:<revision> in single-shard mode).
// Precondition: variant.term_count > 0.
std::string attach_scope(const QueryVariant& variant, const CompletionPoint& cp, ScopeMode mode);

struct LadderConfig {
  std::chrono::milliseconds timeout{200};
  unsigned max_retries = 3;
  // Wait before retry i (the last entry repeats); empty means no wait.
  std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(50),
                                                 std::chrono::milliseconds(100),
                                                 std::chrono::milliseconds(200)};
  std::size_t max_results = 50;
};

struct Attempt {
  VariantId variant = VariantId::FunctionsClassesNaive;
  std::string query;
  std::size_t result_count = 0;
  std::chrono::microseconds duration{0};
  unsigned retries = 0;
  ClientStatus status = ClientStatus::Ok;  // status of the last try
};

struct LadderOutcome {
  std::string cp_id;
  ScopeMode mode = ScopeMode::SingleShard;
  std::optional<VariantId> winning_variant;
  std::vector<Attempt> attempts;  // one per variant sent, in order
  bool hit = false;
  std::vector<SearchResult> results;  // of the winning variant
};

// Keeps results the caller accepts; rejected ones do not count as hits.
using ResultFilter = std::function<bool(const SearchResult&)>;

// Sends the non-skipped variants in order until one returns results.
// Overload, timeout and unreachable replies are retried up to max_retries
// times. Throws QueryRejected when the server refuses a query and
// ClientUnreachable when every variant sent ended unreachable.
LadderOutcome execute_ladder(SearchClient& client, const CompletionPoint& cp, ScopeMode mode,
                             const std::vector<QueryVariant>& variants, const LadderConfig& config,
                             const ResultFilter& keep = {});

}  // namespace scs
