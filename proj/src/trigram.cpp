#include "scs/trigram.hpp"

#include <algorithm>

namespace scs {

std::string Trigram::str() const {
  return std::string{static_cast<char>((value_ >> 16) & 0xFF),
                     static_cast<char>((value_ >> 8) & 0xFF),
                     static_cast<char>(value_ & 0xFF)};
}

std::vector<Trigram> extract_trigrams(std::string_view text) {
  std::vector<Trigram> out;
  if (text.size() < 3) return out;
  out.reserve(text.size() - 2);
  for (std::size_t i = 0; i + 3 <= text.size(); ++i) out.push_back(Trigram::at(text, i));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Trigram> case_variants(Trigram t) {
  const std::string bytes = t.str();
  std::vector<Trigram> out;
  for (unsigned mask = 0; mask < 8; ++mask) {
    unsigned char b[3];
    for (int i = 0; i < 3; ++i) {
      unsigned char c = static_cast<unsigned char>(bytes[i]);
      const bool flip = (mask >> i) & 1u;
      if (flip && c >= 'a' && c <= 'z') c = static_cast<unsigned char>(c - 'a' + 'A');
      else if (flip && c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
      b[i] = c;
    }
    out.push_back(Trigram::from_bytes(b[0], b[1], b[2]));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace scs
