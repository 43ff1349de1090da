#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scs {

// Three raw bytes packed big-endian into the low 24 bits, so ordering of
// Trigram values equals lexicographic byte ordering.
class Trigram {
 public:
  constexpr Trigram() = default;
  constexpr explicit Trigram(std::uint32_t packed) : value_(packed & 0xFFFFFFu) {}

  static constexpr Trigram from_bytes(unsigned char a, unsigned char b, unsigned char c) {
    return Trigram((std::uint32_t{a} << 16) | (std::uint32_t{b} << 8) | std::uint32_t{c});
  }
  // Reads text[pos..pos+3); caller guarantees the bounds.
  static Trigram at(std::string_view text, std::size_t pos) {
    return from_bytes(static_cast<unsigned char>(text[pos]),
                      static_cast<unsigned char>(text[pos + 1]),
                      static_cast<unsigned char>(text[pos + 2]));
  }

  constexpr std::uint32_t value() const { return value_; }
  std::string str() const;

  friend constexpr auto operator<=>(Trigram, Trigram) = default;

 private:
  std::uint32_t value_ = 0;
};

// The distinct set of byte windows of length 3, sorted ascending.
std::vector<Trigram> extract_trigrams(std::string_view text);

// Every ASCII case variant of `t` (1 to 8 entries, sorted, distinct).
std::vector<Trigram> case_variants(Trigram t);

}  // namespace scs
