#include "scs/regex.hpp"

#include <algorithm>
#include <memory>

#include "scs/error.hpp"
#include "scs/text.hpp"

namespace scs {

namespace {

enum class NodeType { Empty, Chars, Begin, End, WordB, NotWordB, Concat, Alt, Star, Plus, Quest };

struct Node {
  NodeType type = NodeType::Empty;
  std::bitset<256> chars;
  int literal = -1;  // byte value when `chars` is a single literal byte
  std::vector<Node> kids;
};

bool is_word_byte(unsigned char c) { return is_ident_char(c); }

std::bitset<256> class_digit() {
  std::bitset<256> s;
  for (int c = '0'; c <= '9'; ++c) s.set(c);
  return s;
}
std::bitset<256> class_word() {
  std::bitset<256> s;
  for (int c = 0; c < 256; ++c) if (is_word_byte(static_cast<unsigned char>(c))) s.set(c);
  return s;
}
std::bitset<256> class_space() {
  std::bitset<256> s;
  for (char c : std::string_view(" \t\n\v\f\r")) s.set(static_cast<unsigned char>(c));
  return s;
}

class Parser {
 public:
  explicit Parser(std::string_view p) : p_(p) {}

  Node parse() {
    if (p_.empty()) throw ParseError(0, "empty regex");
    Node n = alternation();
    if (pos_ < p_.size()) {
      throw ParseError(pos_, p_[pos_] == ')' ? "unbalanced ')' in regex" : "unexpected character in regex");
    }
    return n;
  }

 private:
  bool done() const { return pos_ >= p_.size(); }
  char peek() const { return p_[pos_]; }

  Node alternation() {
    Node first = concatenation();
    if (done() || peek() != '|') return first;
    Node alt;
    alt.type = NodeType::Alt;
    alt.kids.push_back(std::move(first));
    while (!done() && peek() == '|') {
      ++pos_;
      alt.kids.push_back(concatenation());
    }
    return alt;
  }

  Node concatenation() {
    Node cat;
    cat.type = NodeType::Concat;
    while (!done() && peek() != '|' && peek() != ')') cat.kids.push_back(repetition());
    if (cat.kids.empty()) return Node{};
    if (cat.kids.size() == 1) return std::move(cat.kids.front());
    return cat;
  }

  Node repetition() {
    Node atom_node = atom();
    if (done()) return atom_node;
    const char q = peek();
    if (q != '*' && q != '+' && q != '?') return atom_node;
    const auto t = atom_node.type;
    if (t == NodeType::Begin || t == NodeType::End || t == NodeType::WordB || t == NodeType::NotWordB) {
      throw ParseError(pos_, "nothing to repeat");
    }
    ++pos_;
    if (!done() && (peek() == '*' || peek() == '+' || peek() == '?')) {
      throw ParseError(pos_, "stacked quantifiers are not supported");
    }
    Node rep;
    rep.type = q == '*' ? NodeType::Star : q == '+' ? NodeType::Plus : NodeType::Quest;
    rep.kids.push_back(std::move(atom_node));
    return rep;
  }

  static Node chars(std::bitset<256> set, int literal = -1) {
    Node n;
    n.type = NodeType::Chars;
    n.chars = set;
    n.literal = literal;
    return n;
  }
  static Node literal_node(unsigned char c) {
    std::bitset<256> s;
    s.set(c);
    return chars(s, c);
  }

  Node atom() {
    const char c = peek();
    switch (c) {
      case '(': {
        const auto open = pos_++;
        if (p_.substr(pos_, 2) == "?:") pos_ += 2;
        else if (!done() && peek() == '?') throw ParseError(pos_, "unsupported group syntax");
        Node inner = alternation();
        if (done() || peek() != ')') throw ParseError(open, "unbalanced '(' in regex");
        ++pos_;
        return inner;
      }
      case '[': return char_class();
      case '.': {
        ++pos_;
        std::bitset<256> s;
        s.set();
        s.reset('\n');
        s.reset('\r');
        return chars(s);
      }
      case '^': ++pos_; return Node{NodeType::Begin, {}, -1, {}};
      case '$': ++pos_; return Node{NodeType::End, {}, -1, {}};
      case '\\': return escape();
      case '*': case '+': case '?': throw ParseError(pos_, "nothing to repeat");
      case '{': case '}': throw ParseError(pos_, "repetition ranges are not supported");
      case ']': throw ParseError(pos_, "unbalanced ']' in regex");
      default: ++pos_; return literal_node(static_cast<unsigned char>(c));
    }
  }

  // Parses one escape after '\'; returns a class or assertion node.
  Node escape() {
    const auto at = pos_++;
    if (done()) throw ParseError(at, "trailing backslash");
    const char c = p_[pos_++];
    switch (c) {
      case 'b': return Node{NodeType::WordB, {}, -1, {}};
      case 'B': return Node{NodeType::NotWordB, {}, -1, {}};
      default: break;
    }
    std::bitset<256> set;
    int lit = -1;
    if (!escape_set(c, set, lit)) throw ParseError(at, "unsupported escape in regex");
    return chars(set, lit);
  }

  static bool escape_set(char c, std::bitset<256>& set, int& lit) {
    switch (c) {
      case 'd': set = class_digit(); return true;
      case 'D': set = ~class_digit(); return true;
      case 'w': set = class_word(); return true;
      case 'W': set = ~class_word(); return true;
      case 's': set = class_space(); return true;
      case 'S': set = ~class_space(); return true;
      case 'n': lit = '\n'; break;
      case 't': lit = '\t'; break;
      case 'r': lit = '\r'; break;
      case 'f': lit = '\f'; break;
      case 'v': lit = '\v'; break;
      default:
        if (is_ident_char(static_cast<unsigned char>(c))) return false;
        lit = static_cast<unsigned char>(c);
    }
    set.reset();
    set.set(static_cast<std::size_t>(lit));
    return true;
  }

  Node char_class() {
    const auto open = pos_++;
    bool negate = false;
    if (!done() && peek() == '^') {
      negate = true;
      ++pos_;
    }
    std::bitset<256> set;
    bool any = false;
    while (true) {
      if (done()) throw ParseError(open, "unbalanced '[' in regex");
      if (peek() == ']') {
        if (!any) throw ParseError(pos_, "empty character class");
        ++pos_;
        break;
      }
      int lo = -1;
      const auto item_at = pos_;
      if (peek() == '\\') {
        ++pos_;
        if (done()) throw ParseError(item_at, "trailing backslash");
        std::bitset<256> esc;
        if (!escape_set(p_[pos_++], esc, lo)) throw ParseError(item_at, "unsupported escape in class");
        if (lo < 0) {
          set |= esc;
          any = true;
          continue;
        }
      } else {
        lo = static_cast<unsigned char>(p_[pos_++]);
      }
      if (pos_ + 1 < p_.size() && peek() == '-' && p_[pos_ + 1] != ']') {
        ++pos_;
        int hi;
        if (peek() == '\\') {
          ++pos_;
          std::bitset<256> esc;
          hi = -1;
          if (done() || !escape_set(p_[pos_++], esc, hi) || hi < 0) {
            throw ParseError(item_at, "bad range in character class");
          }
        } else {
          hi = static_cast<unsigned char>(p_[pos_++]);
        }
        if (hi < lo) throw ParseError(item_at, "reversed range in character class");
        for (int b = lo; b <= hi; ++b) set.set(static_cast<std::size_t>(b));
      } else {
        set.set(static_cast<std::size_t>(lo));
      }
      any = true;
    }
    if (negate) set = ~set;
    return chars(set);
  }

  std::string_view p_;
  std::size_t pos_ = 0;
};

// Collects literal runs along the mandatory spine of the pattern.
void collect_literals(const Node& n, std::string& run, std::vector<std::string>& out) {
  auto flush = [&] {
    if (!run.empty()) out.push_back(std::move(run));
    run.clear();
  };
  switch (n.type) {
    case NodeType::Chars:
      if (n.literal >= 0) run.push_back(static_cast<char>(n.literal));
      else flush();
      return;
    case NodeType::Begin: case NodeType::End: case NodeType::WordB: case NodeType::NotWordB:
    case NodeType::Empty:
      return;  // zero-width: runs continue across
    case NodeType::Concat:
      for (const auto& k : n.kids) collect_literals(k, run, out);
      return;
    case NodeType::Alt: case NodeType::Star: case NodeType::Plus: case NodeType::Quest:
      flush();
      return;
  }
}

}  // namespace

class RegexCompiler {
 public:
  explicit RegexCompiler(Regex& re) : re_(re) {}

  void emit(const Node& n) {
    using Op = Regex::Op;
    auto& prog = re_.program_;
    switch (n.type) {
      case NodeType::Empty: return;
      case NodeType::Chars: {
        const auto idx = static_cast<std::uint32_t>(re_.classes_.size());
        re_.classes_.push_back(n.chars);
        prog.push_back({Op::Set, idx, 0});
        return;
      }
      case NodeType::Begin: prog.push_back({Op::AssertBegin}); return;
      case NodeType::End: prog.push_back({Op::AssertEnd}); return;
      case NodeType::WordB: prog.push_back({Op::WordBoundary}); return;
      case NodeType::NotWordB: prog.push_back({Op::NotWordBoundary}); return;
      case NodeType::Concat:
        for (const auto& k : n.kids) emit(k);
        return;
      case NodeType::Alt: {
        // split L1, next; L1: kid0; jmp end; next: split ... ; last kid
        std::vector<std::size_t> jumps;
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
          if (i + 1 < n.kids.size()) {
            const auto split = prog.size();
            prog.push_back({Op::Split, static_cast<std::uint32_t>(split + 1), 0});
            emit(n.kids[i]);
            jumps.push_back(prog.size());
            prog.push_back({Op::Jump});
            prog[split].y = static_cast<std::uint32_t>(prog.size());
          } else {
            emit(n.kids[i]);
          }
        }
        for (auto j : jumps) prog[j].x = static_cast<std::uint32_t>(prog.size());
        return;
      }
      case NodeType::Star: {
        const auto split = prog.size();
        prog.push_back({Op::Split, static_cast<std::uint32_t>(split + 1), 0});
        emit(n.kids[0]);
        prog.push_back({Op::Jump, static_cast<std::uint32_t>(split)});
        prog[split].y = static_cast<std::uint32_t>(prog.size());
        return;
      }
      case NodeType::Plus: {
        const auto start = prog.size();
        emit(n.kids[0]);
        prog.push_back({Op::Split, static_cast<std::uint32_t>(start),
                        static_cast<std::uint32_t>(prog.size() + 1)});
        return;
      }
      case NodeType::Quest: {
        const auto split = prog.size();
        prog.push_back({Op::Split, static_cast<std::uint32_t>(split + 1), 0});
        emit(n.kids[0]);
        prog[split].y = static_cast<std::uint32_t>(prog.size());
        return;
      }
    }
  }

 private:
  Regex& re_;
};

Regex Regex::compile(std::string_view pattern) {
  Node root = Parser(pattern).parse();
  Regex re;
  re.pattern_ = std::string(pattern);
  RegexCompiler(re).emit(root);
  re.program_.push_back({Op::Match});

  std::string run;
  collect_literals(root, run, re.literals_);
  if (!run.empty()) re.literals_.push_back(run);
  for (const auto& lit : re.literals_) {
    if (lit.size() > re.longest_literal_.size()) re.longest_literal_ = lit;
  }
  return re;
}

bool Regex::assertion_holds(Op op, std::string_view text, std::size_t pos) const {
  switch (op) {
    case Op::AssertBegin: return pos == 0;
    case Op::AssertEnd: return pos == text.size();
    case Op::WordBoundary:
    case Op::NotWordBoundary: {
      const bool before = pos > 0 && is_word_byte(static_cast<unsigned char>(text[pos - 1]));
      const bool after = pos < text.size() && is_word_byte(static_cast<unsigned char>(text[pos]));
      return (before != after) == (op == Op::WordBoundary);
    }
    default: return true;
  }
}

bool Regex::search(std::string_view text) const {
  if (!longest_literal_.empty() && text.find(longest_literal_) == std::string_view::npos) {
    return false;
  }
  const std::size_t n = program_.size();
  // Sparse sets of program counters for the current and next step.
  std::vector<std::uint32_t> cur, next, stack;
  std::vector<std::size_t> mark(n, static_cast<std::size_t>(-1));
  cur.reserve(n);
  next.reserve(n);

  // Follows epsilon edges from pc at position pos; true when Match reached.
  auto add = [&](std::vector<std::uint32_t>& list, std::uint32_t start, std::size_t pos,
                 std::size_t generation) {
    stack.clear();
    stack.push_back(start);
    while (!stack.empty()) {
      const auto pc = stack.back();
      stack.pop_back();
      if (mark[pc] == generation) continue;
      mark[pc] = generation;
      const auto& inst = program_[pc];
      switch (inst.op) {
        case Op::Match: return true;
        case Op::Jump: stack.push_back(inst.x); break;
        case Op::Split:
          stack.push_back(inst.y);
          stack.push_back(inst.x);
          break;
        case Op::Set: list.push_back(pc); break;
        default:
          if (assertion_holds(inst.op, text, pos)) stack.push_back(pc + 1);
      }
    }
    return false;
  };

  for (std::size_t pos = 0;; ++pos) {
    // generation id = pos; the start thread joins every position.
    if (add(cur, 0, pos, pos)) return true;
    if (pos == text.size()) return false;
    next.clear();
    const auto byte = static_cast<unsigned char>(text[pos]);
    for (auto pc : cur) {
      if (classes_[program_[pc].x].test(byte)) {
        if (add(next, pc + 1, pos + 1, pos + 1)) return true;
      }
    }
    cur.swap(next);
  }
}

}  // namespace scs
