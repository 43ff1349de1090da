#pragma once

#include <bitset>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scs {

// Byte-oriented regular expressions matched in linear time by simulating a
// Thompson NFA (no backtracking). Supported: literals, escapes, character
// classes with ranges and negation, \d \w \s (and negations), '.', '*', '+',
// '?', alternation, grouping ("(" or "(?:"), anchors '^' '$', and word
// boundaries \b \B. Repetition ranges and backreferences are rejected.
//
// Matching is per line: '.' matches any byte except '\n' and '\r', and the
// anchors refer to the start and end of the searched text.
class Regex {
 public:
  // Throws ParseError with a byte position inside `pattern`.
  static Regex compile(std::string_view pattern);

  // True if the pattern matches anywhere in `text`.
  bool search(std::string_view text) const;

  const std::string& pattern() const { return pattern_; }

  // Literal byte runs every match must contain, in pattern order.
  const std::vector<std::string>& mandatory_literals() const { return literals_; }

 private:
  enum class Op : std::uint8_t { Set, Split, Jump, AssertBegin, AssertEnd, WordBoundary, NotWordBoundary, Match };
  struct Inst {
    Op op;
    std::uint32_t x = 0;  // Set: class index; Split/Jump: target
    std::uint32_t y = 0;  // Split: second target
  };
  friend class RegexCompiler;

  bool assertion_holds(Op op, std::string_view text, std::size_t pos) const;

  std::string pattern_;
  std::vector<Inst> program_;
  std::vector<std::bitset<256>> classes_;
  std::vector<std::string> literals_;
  std::string longest_literal_;
};

}  // namespace scs
