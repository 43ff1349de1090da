#include "scs/ladder.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <thread>

#include "scs/error.hpp"

namespace scs {

namespace {

constexpr std::array<std::string_view, kVariantCount> kNames = {
    "functions_classes_naive", "functions_classes_or",     "functions_classes_top5",
    "functions_classes_top4",  "functions_classes_top3",   "functions_classes_regex",
    "navigation_naive",        "navigation_unpacked",      "navigation_unpacked_or",
    "navigation_unpacked_top5", "navigation_unpacked_top4", "navigation_unpacked_top3",
    "navigation_regex",        "identifiers_naive",        "identifiers_or",
    "identifiers_top5",        "identifiers_top4",         "identifiers_top3",
    "identifiers_regex",
};

constexpr std::array<VariantId, kVariantCount> kCanonical = {
    VariantId::FunctionsClassesNaive,  VariantId::FunctionsClassesTop5,
    VariantId::FunctionsClassesTop4,   VariantId::FunctionsClassesTop3,
    VariantId::FunctionsClassesRegex,  VariantId::FunctionsClassesOr,
    VariantId::NavigationNaive,        VariantId::NavigationUnpacked,
    VariantId::NavigationUnpackedTop5, VariantId::NavigationUnpackedTop4,
    VariantId::NavigationUnpackedTop3, VariantId::NavigationRegex,
    VariantId::NavigationUnpackedOr,   VariantId::IdentifiersNaive,
    VariantId::IdentifiersTop5,        VariantId::IdentifiersTop4,
    VariantId::IdentifiersTop3,        VariantId::IdentifiersRegex,
    VariantId::IdentifiersOr,
};

enum class Form { Naive, Or, Top, Regex };
enum class Family { FunctionsClasses, Chains, Components, Identifiers };

struct Recipe {
  Family family;
  Form form;
  std::size_t k = 0;
};

Recipe recipe(VariantId id) {
  switch (id) {
    case VariantId::FunctionsClassesNaive: return {Family::FunctionsClasses, Form::Naive};
    case VariantId::FunctionsClassesOr: return {Family::FunctionsClasses, Form::Or};
    case VariantId::FunctionsClassesTop5: return {Family::FunctionsClasses, Form::Top, 5};
    case VariantId::FunctionsClassesTop4: return {Family::FunctionsClasses, Form::Top, 4};
    case VariantId::FunctionsClassesTop3: return {Family::FunctionsClasses, Form::Top, 3};
    case VariantId::FunctionsClassesRegex: return {Family::FunctionsClasses, Form::Regex};
    case VariantId::NavigationNaive: return {Family::Chains, Form::Naive};
    case VariantId::NavigationUnpacked: return {Family::Components, Form::Naive};
    case VariantId::NavigationUnpackedOr: return {Family::Components, Form::Or};
    case VariantId::NavigationUnpackedTop5: return {Family::Components, Form::Top, 5};
    case VariantId::NavigationUnpackedTop4: return {Family::Components, Form::Top, 4};
    case VariantId::NavigationUnpackedTop3: return {Family::Components, Form::Top, 3};
    case VariantId::NavigationRegex: return {Family::Chains, Form::Regex};
    case VariantId::IdentifiersNaive: return {Family::Identifiers, Form::Naive};
    case VariantId::IdentifiersOr: return {Family::Identifiers, Form::Or};
    case VariantId::IdentifiersTop5: return {Family::Identifiers, Form::Top, 5};
    case VariantId::IdentifiersTop4: return {Family::Identifiers, Form::Top, 4};
    case VariantId::IdentifiersTop3: return {Family::Identifiers, Form::Top, 3};
    case VariantId::IdentifiersRegex: return {Family::Identifiers, Form::Regex};
  }
  throw std::invalid_argument("bad variant id");
}

const std::vector<RankedIdentifier>& family_terms(const MinedTerms& m, Family f) {
  switch (f) {
    case Family::FunctionsClasses: return m.functions_classes;
    case Family::Chains: return m.navigation;
    case Family::Components: return m.navigation_unpacked;
    case Family::Identifiers: break;
  }
  return m.identifiers;
}

std::string escape_regex(std::string_view s) {
  static constexpr std::string_view kMeta = "\\.^$|?*+()[]{}/";
  std::string out;
  for (char c : s) {
    if (kMeta.find(c) != std::string_view::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

QueryNode combine(std::vector<QueryNode> parts, bool conjunction) {
  if (parts.size() == 1) return std::move(parts.front());
  return conjunction ? QueryNode::all_of(std::move(parts)) : QueryNode::any_of(std::move(parts));
}

}  // namespace

std::string_view variant_name(VariantId id) { return kNames.at(static_cast<std::size_t>(id)); }

std::optional<VariantId> parse_variant(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<VariantId>(i);
  }
  return std::nullopt;
}

std::span<const VariantId> canonical_order() { return kCanonical; }

std::string_view to_string(ScopeMode m) { return m == ScopeMode::SingleShard ? "single" : "cross"; }

std::vector<QueryVariant> generate_variants(const MinedTerms& mined, std::span<const VariantId> order) {
  std::array<bool, kVariantCount> seen{};
  for (auto id : order) {
    const auto i = static_cast<std::size_t>(id);
    if (i >= kVariantCount || seen[i]) throw std::invalid_argument("variant order is not a permutation");
    seen[i] = true;
  }
  if (order.size() != kVariantCount) throw std::invalid_argument("variant order must list all 19 variants");

  std::set<std::pair<Family, std::vector<std::string>>> sent_conjunctions;
  std::vector<QueryVariant> out;
  out.reserve(kVariantCount);
  for (auto id : order) {
    QueryVariant v;
    v.id = id;
    const auto r = recipe(id);
    const auto& ranked = family_terms(mined, r.family);
    std::vector<std::string> terms;
    for (const auto& t : ranked) terms.push_back(t.name);

    if (r.form == Form::Top) {
      const bool short_family = terms.size() < r.k;
      if (!short_family) terms.resize(r.k);
      auto key = std::make_pair(r.family, terms);
      std::sort(key.second.begin(), key.second.end());
      if (short_family && sent_conjunctions.count(key) > 0) terms.clear();
    }
    if (!terms.empty()) {
      std::vector<QueryNode> parts;
      for (const auto& t : terms) {
        parts.push_back(r.form == Form::Regex ? QueryNode::regex("\\b" + escape_regex(t) + "\\b")
                                              : QueryNode::term(t, true));
      }
      const bool conj = r.form == Form::Naive || r.form == Form::Top;
      if (conj) {
        auto key = std::make_pair(r.family, terms);
        std::sort(key.second.begin(), key.second.end());
        sent_conjunctions.insert(std::move(key));
      }
      v.body = combine(std::move(parts), conj);
      v.query_text = render_query(*v.body);
    }
    v.term_count = terms.size();
    v.terms = std::move(terms);
    out.push_back(std::move(v));
  }
  return out;
}

std::string attach_scope(const QueryVariant& variant, const CompletionPoint& cp, ScopeMode mode) {
  if (!variant.body) throw std::invalid_argument("attach_scope on a skipped variant");
  std::vector<QueryNode> parts{QueryNode::filter(FilterKind::Repo, cp.repo_id)};
  if (mode == ScopeMode::SingleShard) parts.push_back(QueryNode::filter(FilterKind::Revision, cp.revision_id));
  parts.push_back(*variant.body);
  return render_query(QueryNode::all_of(std::move(parts)));
}

LadderOutcome execute_ladder(SearchClient& client, const CompletionPoint& cp, ScopeMode mode,
                             const std::vector<QueryVariant>& variants, const LadderConfig& config,
                             const ResultFilter& keep) {
  using clock = std::chrono::steady_clock;
  LadderOutcome outcome;
  outcome.cp_id = cp.id;
  outcome.mode = mode;
  std::size_t unreachable = 0;
  std::string last_error;

  for (const auto& v : variants) {
    if (v.term_count == 0) continue;
    Attempt attempt;
    attempt.variant = v.id;
    attempt.query = attach_scope(v, cp, mode);
    const SearchRequest request{attempt.query, config.max_results, config.timeout};
    const auto started = clock::now();
    ClientReply reply;
    for (unsigned tries = 0;; ++tries) {
      reply = client.search(request, config.timeout);
      attempt.retries = tries;
      const bool transient = reply.status == ClientStatus::Overloaded ||
                             reply.status == ClientStatus::Timeout ||
                             reply.status == ClientStatus::Unreachable;
      if (!transient || tries >= config.max_retries) break;
      if (!config.backoff.empty()) {
        std::this_thread::sleep_for(config.backoff[std::min<std::size_t>(tries, config.backoff.size() - 1)]);
      }
    }
    attempt.duration = std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - started);
    attempt.status = reply.status;
    if (reply.status == ClientStatus::Rejected) {
      throw QueryRejected("query rejected: " + attempt.query + ": " + reply.message);
    }
    if (reply.status == ClientStatus::Unreachable) {
      ++unreachable;
      last_error = reply.message;
    }

    auto results = std::move(reply.response.results);
    if (reply.status != ClientStatus::Ok) results.clear();
    if (keep) std::erase_if(results, [&](const SearchResult& r) { return !keep(r); });
    attempt.result_count = results.size();
    outcome.attempts.push_back(std::move(attempt));
    if (!results.empty()) {
      outcome.hit = true;
      outcome.winning_variant = v.id;
      outcome.results = std::move(results);
      return outcome;
    }
  }
  if (!outcome.attempts.empty() && unreachable == outcome.attempts.size()) {
    throw ClientUnreachable("search service unreachable: " + last_error);
  }
  return outcome;
}

}  // namespace scs
