#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scs {

inline bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

inline bool is_ident_char(unsigned char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string to_lower_ascii(std::string_view text);

// Byte offsets of line starts as stored in a shard: always begins with 0, a
// new line starts after every '\n' that is not the final byte.
std::vector<std::uint32_t> line_starts(std::string_view content);

// Text of line `index` (0-based) without its terminating '\n'.
inline std::string_view line_at(std::string_view content,
                                const std::vector<std::uint32_t>& starts, std::size_t index) {
  const std::size_t begin = starts[index];
  std::size_t end = index + 1 < starts.size() ? starts[index + 1] - 1 : content.size();
  if (index + 1 == starts.size() && end > begin && content[end - 1] == '\n') --end;
  return content.substr(begin, end - begin);
}

// Lines for diffing: empty text has no lines; otherwise the text is split on
// '\n' and a trailing newline yields a final empty line.
std::vector<std::string_view> split_lines(std::string_view text);

std::string join_lines(const std::vector<std::string_view>& lines);

}  // namespace scs
