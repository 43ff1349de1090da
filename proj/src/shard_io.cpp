#include "scs/shard_io.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <zlib.h>

#include "scs/error.hpp"
#include "scs/text.hpp"

namespace scs {

namespace {

enum SectionTag : std::uint32_t {
  kMeta = 1,
  kFiles = 2,
  kContent = 3,
  kPostings = 4,
  kSymbols = 5,
};

std::uint32_t checksum(std::string_view bytes) {
  // zlib takes uInt lengths; feed large payloads in chunks.
  uLong crc = crc32(0L, Z_NULL, 0);
  while (!bytes.empty()) {
    const auto chunk = std::min<std::size_t>(bytes.size(), 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(chunk));
    bytes.remove_prefix(chunk);
  }
  return static_cast<std::uint32_t>(crc);
}

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view bytes, const char* what) : bytes_(bytes), what_(what) {}

  std::string_view take(std::size_t n) {
    if (n > bytes_.size() - pos_) {
      throw CorruptShard(std::string("truncated ") + what_);
    }
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<unsigned char>(b[i])} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{static_cast<unsigned char>(b[i])} << (8 * i);
    return v;
  }
  std::string str() { return std::string(take(u32())); }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void expect_end() const {
    if (remaining() != 0) throw CorruptShard(std::string("trailing bytes in ") + what_);
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
  const char* what_;
};

void put_section(ByteWriter& out, SectionTag tag, std::string_view payload) {
  out.u32(tag);
  out.u64(payload.size());
  out.raw(payload);
  out.u32(checksum(payload));
}

std::string_view get_section(ByteReader& in, SectionTag tag) {
  if (in.u32() != tag) throw CorruptShard("unexpected section tag");
  const auto length = in.u64();
  if (length > in.remaining()) throw CorruptShard("truncated section");
  auto payload = in.take(static_cast<std::size_t>(length));
  if (in.u32() != checksum(payload)) throw CorruptShard("section checksum mismatch");
  return payload;
}

}  // namespace

std::string serialize_shard(const Shard& shard, std::uint32_t format_version) {
  ByteWriter out;
  out.raw(kShardMagic);
  ByteWriter version;
  version.u32(format_version);
  const auto version_bytes = version.take();
  out.raw(version_bytes);
  out.u32(checksum(version_bytes));

  const auto& meta = shard.meta();
  ByteWriter m;
  m.str(meta.repo_id);
  m.str(meta.revision_id);
  m.u32(meta.file_count);
  m.u64(static_cast<std::uint64_t>(meta.built_at));
  put_section(out, kMeta, m.take());

  ByteWriter files;
  ByteWriter blob;
  std::uint64_t offset = 0;
  files.u32(static_cast<std::uint32_t>(shard.files().size()));
  for (const auto& f : shard.files()) {
    files.str(f.path);
    files.u8(static_cast<std::uint8_t>(f.language));
    files.u64(offset);
    files.u64(f.content.size());
    blob.raw(f.content);
    offset += f.content.size();
  }
  put_section(out, kFiles, files.take());
  put_section(out, kContent, blob.take());

  ByteWriter post;
  post.u32(static_cast<std::uint32_t>(shard.posting_table().size()));
  for (const auto& range : shard.posting_table()) {
    post.u32(range.key.value());
    post.u32(range.end - range.begin);
  }
  for (const auto& p : shard.all_postings()) {
    post.u32(p.file);
    post.u32(p.offset);
  }
  put_section(out, kPostings, post.take());

  ByteWriter syms;
  syms.u32(static_cast<std::uint32_t>(shard.symbols().size()));
  for (const auto& s : shard.symbols()) {
    syms.str(s.name);
    syms.u8(static_cast<std::uint8_t>(s.kind));
    syms.u32(static_cast<std::uint32_t>(shard.find_file(s.path)));
    syms.u32(s.line);
  }
  put_section(out, kSymbols, syms.take());
  return out.take();
}

Shard deserialize_shard(std::string_view bytes) {
  ByteReader in(bytes, "shard");
  if (in.remaining() < kShardMagic.size() || in.take(kShardMagic.size()) != kShardMagic) {
    throw CorruptShard("bad magic");
  }
  const auto version_bytes = in.take(4);
  if (in.u32() != checksum(version_bytes)) throw CorruptShard("header checksum mismatch");
  ByteReader vr(version_bytes, "header");
  const auto version = vr.u32();
  if (version != kShardFormatVersion) throw VersionMismatch(version);

  ShardMeta meta;
  {
    ByteReader m(get_section(in, kMeta), "meta section");
    meta.repo_id = m.str();
    meta.revision_id = m.str();
    meta.file_count = m.u32();
    meta.built_at = static_cast<std::int64_t>(m.u64());
    meta.format_version = version;
    m.expect_end();
  }

  std::vector<FileRecord> files;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> extents;
  {
    ByteReader f(get_section(in, kFiles), "file table");
    const auto count = f.u32();
    if (count != meta.file_count) throw CorruptShard("file table size mismatch");
    // Each entry is at least 21 bytes; reject absurd counts before reserving.
    if (std::size_t{count} * 21 > f.remaining()) throw CorruptShard("truncated file table");
    files.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      FileRecord rec;
      rec.path = f.str();
      const auto lang = f.u8();
      if (lang > static_cast<std::uint8_t>(Language::Other)) throw CorruptShard("bad language tag");
      rec.language = static_cast<Language>(lang);
      const auto off = f.u64();
      const auto len = f.u64();
      extents.emplace_back(off, len);
      files.push_back(std::move(rec));
    }
    f.expect_end();
  }
  {
    const auto blob = get_section(in, kContent);
    std::uint64_t expected_offset = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
      const auto [off, len] = extents[i];
      if (off != expected_offset || len > blob.size() - off) throw CorruptShard("bad content extent");
      files[i].content = std::string(blob.substr(off, len));
      files[i].line_offsets = line_starts(files[i].content);
      expected_offset = off + len;
    }
    if (expected_offset != blob.size()) throw CorruptShard("content blob size mismatch");
  }

  std::vector<PostingRange> table;
  std::vector<Posting> postings;
  {
    ByteReader p(get_section(in, kPostings), "postings");
    const auto keys = p.u32();
    if (std::size_t{keys} * 8 > p.remaining()) throw CorruptShard("truncated posting table");
    table.reserve(keys);
    std::uint64_t total = 0;
    for (std::uint32_t k = 0; k < keys; ++k) {
      const auto key = p.u32();
      const auto count = p.u32();
      if (key > 0xFFFFFFu) throw CorruptShard("bad trigram key");
      table.push_back(PostingRange{Trigram(key), static_cast<std::uint32_t>(total),
                                   static_cast<std::uint32_t>(total + count)});
      total += count;
      if (total > 0xFFFFFFFFull) throw CorruptShard("posting count overflow");
    }
    if (total * 8 != p.remaining()) throw CorruptShard("posting payload size mismatch");
    postings.reserve(static_cast<std::size_t>(total));
    for (std::uint64_t i = 0; i < total; ++i) {
      const auto file = p.u32();
      const auto offset = p.u32();
      postings.push_back(Posting{file, offset});
    }
  }

  std::vector<SymbolEntry> symbols;
  {
    ByteReader s(get_section(in, kSymbols), "symbols");
    const auto count = s.u32();
    if (std::size_t{count} * 13 > s.remaining()) throw CorruptShard("truncated symbol table");
    symbols.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      SymbolEntry e;
      e.name = s.str();
      const auto kind = s.u8();
      if (kind > static_cast<std::uint8_t>(SymbolKind::Other)) throw CorruptShard("bad symbol kind");
      e.kind = static_cast<SymbolKind>(kind);
      const auto file = s.u32();
      if (file >= files.size()) throw CorruptShard("symbol file index out of range");
      e.path = files[file].path;
      e.line = s.u32();
      symbols.push_back(std::move(e));
    }
    s.expect_end();
  }
  in.expect_end();

  return Shard::from_parts(std::move(meta), std::move(files), std::move(table),
                           std::move(postings), std::move(symbols));
}

void write_shard(const Shard& shard, std::ostream& sink) {
  const auto bytes = serialize_shard(shard);
  sink.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw Error("failed to write shard " + shard.meta().repo_id);
}

Shard read_shard(std::istream& source) {
  std::string bytes{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  return deserialize_shard(bytes);
}

void save_shard(const Shard& shard, const std::filesystem::path& file) {
  const auto tmp = std::filesystem::path(file.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    write_shard(shard, out);
  }
  std::filesystem::rename(tmp, file);
}

Shard load_shard(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open shard " + file.string());
  return read_shard(in);
}

}  // namespace scs
