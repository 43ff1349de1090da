#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "scs/shard.hpp"

namespace scs {

// On-disk layout, all integers little-endian:
//
//   "SCS\x01"  u32 format_version  u32 crc32(format_version bytes)
//   5 x section: u32 tag  u64 length  payload[length]  u32 crc32(payload)
//
// Sections in order: meta(1), file table(2), content blob(3), postings(4),
// symbols(5). Line offsets and derived lookups are rebuilt on load.
inline constexpr std::string_view kShardMagic{"SCS\x01", 4};

std::string serialize_shard(const Shard& shard, std::uint32_t format_version = kShardFormatVersion);

// Throws CorruptShard (bad magic, truncated or trailing data, checksum or
// structural failure) or VersionMismatch.
Shard deserialize_shard(std::string_view bytes);

void write_shard(const Shard& shard, std::ostream& sink);
Shard read_shard(std::istream& source);

void save_shard(const Shard& shard, const std::filesystem::path& file);
Shard load_shard(const std::filesystem::path& file);

}  // namespace scs
