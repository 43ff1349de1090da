#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace scs {

enum class EditKind : std::uint8_t { Keep, Delete, Insert };

struct Edit {
  EditKind kind;
  std::uint32_t a = 0;  // index into the old sequence (Keep, Delete)
  std::uint32_t b = 0;  // index into the new sequence (Keep, Insert)
};

// Shortest edit script between two line sequences (Myers' O(ND) algorithm,
// linear-space middle-snake bisection). Within each changed hunk deletions
// precede insertions.
std::vector<Edit> diff_sequences(std::span<const std::string_view> a,
                                 std::span<const std::string_view> b);

}  // namespace scs
