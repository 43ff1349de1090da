#include "scs/assembler.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

#include "scs/error.hpp"
#include "scs/text.hpp"

namespace scs {

namespace {

// Exactly one entry per '\n'-separated segment; "" is one empty line.
std::vector<std::string_view> segments(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const auto nl = text.find('\n', begin);
    if (nl == std::string_view::npos) {
      out.push_back(text.substr(begin));
      return out;
    }
    out.push_back(text.substr(begin, nl - begin));
    begin = nl + 1;
  }
}

std::string join(const std::vector<std::string_view>& lines, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out.push_back('\n');
    out.append(lines[i]);
  }
  return out;
}

bool candidate_before(const Snippet& a, const Snippet& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.path, a.line_start, a.repo_id, a.revision_id) <
         std::tie(b.path, b.line_start, b.repo_id, b.revision_id);
}

// Drops trailing lines until the snippet fits `limit`; false if nothing fits.
bool truncate_to(Snippet& s, long limit, const Tokenizer& tokenizer) {
  if (static_cast<long>(s.token_count) <= limit) return true;
  auto lines = segments(s.text);
  // Largest prefix length that fits; counts grow with prefix length for
  // whitespace-additive counters, verified below for any counter.
  std::size_t lo = 0, hi = lines.size();
  while (lo < hi) {
    const auto mid = (lo + hi + 1) / 2;
    if (static_cast<long>(tokenizer.count(join(lines, 0, mid))) <= limit) lo = mid;
    else hi = mid - 1;
  }
  while (lo > 0 && static_cast<long>(tokenizer.count(join(lines, 0, lo))) > limit) --lo;
  if (lo == 0) return false;
  s.text = join(lines, 0, lo);
  s.line_end = s.line_start + static_cast<std::uint32_t>(lo) - 1;
  s.token_count = tokenizer.count(s.text);
  return true;
}

}  // namespace

TokenBudget compute_budget(long model_max, long reserved_buffer, std::string_view prefix,
                           std::string_view suffix, const Tokenizer& tokenizer,
                           std::optional<long> per_file_budget, std::size_t top_k) {
  TokenBudget b;
  b.model_max = model_max;
  b.reserved_buffer = reserved_buffer;
  b.prefix_suffix_tokens = static_cast<long>(tokenizer.count(prefix) + tokenizer.count(suffix));
  b.total_constraint = model_max - b.prefix_suffix_tokens - reserved_buffer;
  long r = per_file_budget ? *per_file_budget : b.total_constraint / 2;
  if (b.total_constraint > 0) r = std::min(r, b.total_constraint);
  b.per_file_budget = std::max(1L, r);
  b.top_k_files = std::max<std::size_t>(1, top_k);
  return b;
}

std::vector<Snippet> merge_overlaps(std::vector<Snippet> snippets, const Tokenizer& tokenizer) {
  std::sort(snippets.begin(), snippets.end(), [](const Snippet& a, const Snippet& b) {
    return std::tie(a.line_start, a.line_end) < std::tie(b.line_start, b.line_end);
  });
  std::vector<Snippet> out;
  for (auto& s : snippets) {
    if (s.line_end < s.line_start) throw std::invalid_argument("snippet with line_end < line_start");
    if (!out.empty() && s.line_start <= out.back().line_end + 1) {
      auto& cur = out.back();
      if (s.line_end > cur.line_end) {
        const auto lines = segments(s.text);
        const std::size_t skip = cur.line_end + 1 - s.line_start;
        if (lines.size() != s.line_end - s.line_start + 1) {
          throw std::invalid_argument("snippet text does not match its line range");
        }
        cur.text += '\n';
        cur.text += join(lines, skip, lines.size());
        cur.line_end = s.line_end;
      }
      cur.score = std::max(cur.score, s.score);
      continue;
    }
    out.push_back(std::move(s));
  }
  for (auto& s : out) s.token_count = tokenizer.count(s.text);
  return out;
}

std::string snippet_header(const Snippet& s, Language lang) {
  return std::string(comment_token(lang)) + " " + s.path + ":" + std::to_string(s.line_start) + "-" +
         std::to_string(s.line_end) + "@" + s.revision_id;
}

ContextBundle assemble(const std::string& cp_id, const std::vector<SearchResult>& results,
                       const ContentSource& source, const TokenBudget& budget, const Tokenizer& tokenizer,
                       Language lang) {
  ContextBundle bundle;
  bundle.cp_id = cp_id;
  if (budget.total_constraint <= 0 || results.empty()) return bundle;

  using FileKey = std::tuple<std::string, std::string, std::string>;
  std::vector<FileKey> order;
  std::map<FileKey, std::vector<const SearchResult*>> groups;
  for (const auto& r : results) {
    FileKey key{r.repo_id, r.revision_id, r.path};
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(&r);
  }

  const long R = budget.per_file_budget;
  std::vector<Snippet> candidates;
  for (const auto& key : order) {
    const auto& [repo, rev, path] = key;
    auto content = source.fetch(repo, rev, path);
    if (!content) throw MissingFile("result references missing file " + repo + "@" + rev + ":" + path);
    const auto& hits = groups[key];
    double best = 0.0;
    for (const auto* h : hits) best = std::max(best, h->score);

    const auto starts = line_starts(*content);
    auto whole_text = std::string_view(*content);
    if (!whole_text.empty() && whole_text.back() == '\n') whole_text.remove_suffix(1);
    const auto whole_tokens = tokenizer.count(whole_text);
    if (static_cast<long>(whole_tokens) <= R) {
      candidates.push_back(Snippet{path, repo, rev, 1, static_cast<std::uint32_t>(starts.size()),
                                   std::string(whole_text), best, whole_tokens});
      continue;
    }
    std::vector<Snippet> parts;
    for (const auto* h : hits) {
      const auto last = std::min<std::size_t>(h->line_end, starts.size());
      if (h->line_start < 1 || h->line_start > last) {
        throw MissingFile("result line range outside " + path);
      }
      std::string text;
      for (std::size_t line = h->line_start; line <= last; ++line) {
        if (line > h->line_start) text.push_back('\n');
        text.append(line_at(*content, starts, line - 1));
      }
      parts.push_back(Snippet{path, repo, rev, h->line_start, static_cast<std::uint32_t>(last),
                              std::move(text), h->score, 0});
    }
    for (auto& s : merge_overlaps(std::move(parts), tokenizer)) {
      if (truncate_to(s, R, tokenizer)) candidates.push_back(std::move(s));
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), candidate_before);

  const auto T = static_cast<std::size_t>(budget.total_constraint);
  for (auto& c : candidates) {
    if (bundle.snippets.size() >= budget.top_k_files) break;
    const auto header = snippet_header(c, lang);
    const auto cost = tokenizer.count(header) + c.token_count;
    if (bundle.total_tokens + cost > T) break;
    if (!bundle.rendered.empty()) bundle.rendered.push_back('\n');
    bundle.rendered += header;
    bundle.rendered.push_back('\n');
    bundle.rendered += c.text;
    bundle.total_tokens += cost;
    bundle.snippets.push_back(std::move(c));
  }
  return bundle;
}

}  // namespace scs
