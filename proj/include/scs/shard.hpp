#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scs/language.hpp"
#include "scs/parallel.hpp"
#include "scs/symbols.hpp"
#include "scs/trigram.hpp"

namespace scs {

inline constexpr std::uint32_t kShardFormatVersion = 1;

struct ShardMeta {
  std::string repo_id;
  std::string revision_id;
  std::uint32_t file_count = 0;
  std::int64_t built_at = 0;  // seconds since the Unix epoch, UTC
  std::uint32_t format_version = kShardFormatVersion;

  friend bool operator==(const ShardMeta&, const ShardMeta&) = default;
};

struct FileRecord {
  std::string path;
  std::string content;
  std::vector<std::uint32_t> line_offsets;
  Language language = Language::Other;

  std::size_t line_count() const { return line_offsets.size(); }
  std::string_view line(std::size_t index) const;  // 0-based, no '\n'
  // 0-based line containing byte `offset`.
  std::size_t line_of(std::size_t offset) const;
};

struct Posting {
  std::uint32_t file = 0;
  std::uint32_t offset = 0;

  friend auto operator<=>(const Posting&, const Posting&) = default;
};

// One distinct trigram and its slice of the flat posting array.
struct PostingRange {
  Trigram key;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
};

struct SourceFile {
  std::string path;
  std::string content;
  Language language = Language::Other;
};

struct BuildOptions {
  std::int64_t built_at = 0;
  Execution execution = Execution::Parallel;
};

// Immutable index of one (repository, revision) snapshot. Safe to share
// between any number of concurrent readers.
class Shard {
 public:
  Shard() = default;

  // Assembles a shard from already-built parts and checks every structural
  // invariant (posting soundness and completeness, symbol bounds). Throws
  // CorruptShard on violation.
  static Shard from_parts(ShardMeta meta, std::vector<FileRecord> files,
                          std::vector<PostingRange> table, std::vector<Posting> postings,
                          std::vector<SymbolEntry> symbols);

  const ShardMeta& meta() const { return meta_; }
  const std::vector<FileRecord>& files() const { return files_; }
  const std::vector<SymbolEntry>& symbols() const { return symbols_; }
  const std::vector<PostingRange>& posting_table() const { return table_; }
  std::span<const Posting> all_postings() const { return postings_; }

  std::span<const Posting> postings(Trigram key) const;

  // ASCII-lowercased copy of file content, used for case-insensitive terms.
  std::string_view folded_content(std::size_t file) const { return folded_[file]; }

  // Symbols declared in `file`, ordered by line.
  std::span<const SymbolEntry> file_symbols(std::size_t file) const;

  // Index of `path` in files(), or -1.
  long find_file(std::string_view path) const;

 private:
  friend Shard build_shard(const std::string&, const std::string&, std::vector<SourceFile>,
                           const BuildOptions&);
  void finish();

  ShardMeta meta_;
  std::vector<FileRecord> files_;
  std::vector<PostingRange> table_;
  std::vector<Posting> postings_;
  std::vector<SymbolEntry> symbols_;  // grouped by file, then (line, name)
  std::vector<std::uint32_t> symbol_begin_;  // per file, plus sentinel
  std::vector<std::string> folded_;
  std::vector<std::uint32_t> path_order_;  // file indices sorted by path
};

// Indexes one revision. Files containing a NUL byte are skipped with a
// warning. Throws EmptyIdentity or DuplicatePath.
Shard build_shard(const std::string& repo_id, const std::string& revision_id,
                  std::vector<SourceFile> files, const BuildOptions& options = {});

// Exhaustively checks posting soundness and completeness; returns a
// description of the first violation, or an empty string.
std::string verify_postings(const Shard& shard);

}  // namespace scs
