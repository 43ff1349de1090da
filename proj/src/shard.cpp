#include "scs/shard.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "scs/error.hpp"
#include "scs/text.hpp"

namespace scs {

namespace {

struct Window {
  std::uint32_t key;
  std::uint32_t file;
  std::uint32_t offset;
};

// Stable LSD radix sort on the 24-bit key, two 12-bit digits. Input arrives
// in (file, offset) order, so the output is sorted by (key, file, offset).
void radix_sort_windows(std::vector<Window>& windows) {
  constexpr std::uint32_t kBuckets = 1u << 12;
  std::vector<Window> scratch(windows.size());
  std::vector<std::uint32_t> count(kBuckets + 1);
  for (int pass = 0; pass < 2; ++pass) {
    const int shift = pass * 12;
    std::fill(count.begin(), count.end(), 0);
    for (const auto& w : windows) ++count[((w.key >> shift) & (kBuckets - 1)) + 1];
    for (std::uint32_t b = 0; b < kBuckets; ++b) count[b + 1] += count[b];
    for (const auto& w : windows) scratch[count[(w.key >> shift) & (kBuckets - 1)]++] = w;
    windows.swap(scratch);
  }
}

std::string check_shard(const ShardMeta& meta, const std::vector<FileRecord>& files,
                        std::span<const PostingRange> table,
                        std::span<const Posting> postings) {
  if (meta.repo_id.empty() || meta.revision_id.empty()) return "empty repo or revision id";
  if (meta.file_count != files.size()) return "file_count does not match file table";
  std::size_t expected = 0;
  for (const auto& f : files) {
    if (f.content.size() >= 3) expected += f.content.size() - 2;
    const auto& lo = f.line_offsets;
    if (lo.empty() || lo[0] != 0) return "line offsets must start at 0: " + f.path;
    for (std::size_t i = 1; i < lo.size(); ++i) {
      if (lo[i] <= lo[i - 1]) return "line offsets not increasing: " + f.path;
    }
    if (lo.back() > f.content.size()) return "line offset past end: " + f.path;
  }
  if (postings.size() != expected) {
    return "posting count " + std::to_string(postings.size()) + " != windows " +
           std::to_string(expected);
  }
  std::uint32_t cursor = 0;
  for (std::size_t k = 0; k < table.size(); ++k) {
    const auto& range = table[k];
    if (k > 0 && !(table[k - 1].key < range.key)) return "posting keys not strictly increasing";
    if (range.begin != cursor || range.end <= range.begin || range.end > postings.size()) {
      return "posting ranges not contiguous";
    }
    for (std::uint32_t i = range.begin; i < range.end; ++i) {
      const auto& p = postings[i];
      if (i > range.begin && !(postings[i - 1] < p)) return "posting list not sorted";
      if (p.file >= files.size()) return "posting file index out of range";
      const auto& content = files[p.file].content;
      if (std::size_t{p.offset} + 3 > content.size()) return "posting offset out of range";
      if (Trigram::at(content, p.offset) != range.key) {
        return "posting does not match its trigram at " + files[p.file].path + ":" +
               std::to_string(p.offset);
      }
    }
    cursor = range.end;
  }
  if (cursor != postings.size()) return "postings not covered by table";
  // Sound, duplicate-free and equal in number to all windows: complete.
  return {};
}

}  // namespace

std::string_view FileRecord::line(std::size_t index) const {
  return line_at(content, line_offsets, index);
}

std::size_t FileRecord::line_of(std::size_t offset) const {
  auto it = std::upper_bound(line_offsets.begin(), line_offsets.end(), offset);
  return static_cast<std::size_t>(it - line_offsets.begin()) - 1;
}

std::span<const Posting> Shard::postings(Trigram key) const {
  auto it = std::lower_bound(table_.begin(), table_.end(), key,
                             [](const PostingRange& r, Trigram k) { return r.key < k; });
  if (it == table_.end() || it->key != key) return {};
  return std::span<const Posting>(postings_).subspan(it->begin, it->end - it->begin);
}

std::span<const SymbolEntry> Shard::file_symbols(std::size_t file) const {
  return std::span<const SymbolEntry>(symbols_).subspan(
      symbol_begin_[file], symbol_begin_[file + 1] - symbol_begin_[file]);
}

long Shard::find_file(std::string_view path) const {
  auto it = std::lower_bound(path_order_.begin(), path_order_.end(), path,
                             [this](std::uint32_t idx, std::string_view p) {
                               return files_[idx].path < p;
                             });
  if (it == path_order_.end() || files_[*it].path != path) return -1;
  return static_cast<long>(*it);
}

void Shard::finish() {
  folded_.clear();
  folded_.reserve(files_.size());
  for (const auto& f : files_) folded_.push_back(to_lower_ascii(f.content));

  path_order_.resize(files_.size());
  for (std::uint32_t i = 0; i < files_.size(); ++i) path_order_[i] = i;
  std::sort(path_order_.begin(), path_order_.end(),
            [this](std::uint32_t a, std::uint32_t b) { return files_[a].path < files_[b].path; });

  std::vector<std::uint32_t> owner(symbols_.size());
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const long f = find_file(symbols_[i].path);
    owner[i] = static_cast<std::uint32_t>(f);
  }
  std::vector<std::size_t> order(symbols_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (owner[a] != owner[b]) return owner[a] < owner[b];
    if (symbols_[a].line != symbols_[b].line) return symbols_[a].line < symbols_[b].line;
    return symbols_[a].name < symbols_[b].name;
  });
  std::vector<SymbolEntry> sorted;
  sorted.reserve(symbols_.size());
  symbol_begin_.assign(files_.size() + 1, 0);
  for (auto i : order) {
    ++symbol_begin_[owner[i] + 1];
    sorted.push_back(std::move(symbols_[i]));
  }
  for (std::size_t f = 0; f < files_.size(); ++f) symbol_begin_[f + 1] += symbol_begin_[f];
  symbols_ = std::move(sorted);
}

Shard Shard::from_parts(ShardMeta meta, std::vector<FileRecord> files,
                        std::vector<PostingRange> table, std::vector<Posting> postings,
                        std::vector<SymbolEntry> symbols) {
  if (auto problem = check_shard(meta, files, table, postings); !problem.empty()) {
    throw CorruptShard(problem);
  }
  std::unordered_map<std::string_view, std::size_t> by_path;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!by_path.emplace(files[i].path, i).second) throw CorruptShard("duplicate path " + files[i].path);
  }
  for (const auto& s : symbols) {
    auto it = by_path.find(s.path);
    if (it == by_path.end()) throw CorruptShard("symbol refers to unknown file " + s.path);
    if (s.name.empty() || s.line == 0 || s.line > files[it->second].line_count()) {
      throw CorruptShard("symbol out of range in " + s.path);
    }
  }
  Shard shard;
  shard.meta_ = std::move(meta);
  shard.files_ = std::move(files);
  shard.table_ = std::move(table);
  shard.postings_ = std::move(postings);
  shard.symbols_ = std::move(symbols);
  shard.finish();
  return shard;
}

Shard build_shard(const std::string& repo_id, const std::string& revision_id,
                  std::vector<SourceFile> inputs, const BuildOptions& options) {
  if (repo_id.empty() || revision_id.empty()) throw EmptyIdentity();
  {
    std::unordered_set<std::string_view> seen;
    for (const auto& f : inputs) {
      if (!seen.insert(f.path).second) throw DuplicatePath(f.path);
    }
  }

  Shard shard;
  for (auto& in : inputs) {
    if (in.content.find('\0') != std::string::npos) {
      spdlog::warn("{}@{}: skipping binary file {}", repo_id, revision_id, in.path);
      continue;
    }
    FileRecord rec;
    rec.path = std::move(in.path);
    rec.content = std::move(in.content);
    rec.language = in.language;
    shard.files_.push_back(std::move(rec));
  }
  const std::size_t n = shard.files_.size();

  std::vector<std::vector<SymbolEntry>> per_file_symbols(n);
  std::vector<std::size_t> window_begin(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto size = shard.files_[i].content.size();
    window_begin[i + 1] = window_begin[i] + (size >= 3 ? size - 2 : 0);
  }
  std::vector<Window> windows(window_begin[n]);

  for_each_index(n, options.execution, [&](std::size_t i) {
    auto& rec = shard.files_[i];
    rec.line_offsets = line_starts(rec.content);
    if (rec.language != Language::Other) {
      per_file_symbols[i] = extract_symbols(rec.path, rec.content, rec.language);
    }
    const std::string_view text = rec.content;
    Window* out = windows.data() + window_begin[i];
    for (std::size_t o = 0; o + 3 <= text.size(); ++o) {
      *out++ = Window{Trigram::at(text, o).value(), static_cast<std::uint32_t>(i),
                      static_cast<std::uint32_t>(o)};
    }
  });

  radix_sort_windows(windows);
  shard.postings_.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (i == 0 || windows[i].key != windows[i - 1].key) {
      if (!shard.table_.empty()) shard.table_.back().end = static_cast<std::uint32_t>(i);
      shard.table_.push_back(PostingRange{Trigram(windows[i].key), static_cast<std::uint32_t>(i), 0});
    }
    shard.postings_.push_back(Posting{windows[i].file, windows[i].offset});
  }
  if (!shard.table_.empty()) shard.table_.back().end = static_cast<std::uint32_t>(windows.size());

  for (auto& syms : per_file_symbols) {
    for (auto& s : syms) shard.symbols_.push_back(std::move(s));
  }
  shard.meta_ = ShardMeta{repo_id, revision_id, static_cast<std::uint32_t>(n), options.built_at,
                          kShardFormatVersion};
  shard.finish();
  return shard;
}

std::string verify_postings(const Shard& shard) {
  return check_shard(shard.meta(), shard.files(), shard.posting_table(), shard.all_postings());
}

}  // namespace scs
