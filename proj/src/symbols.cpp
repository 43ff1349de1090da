#include "scs/symbols.hpp"

#include <algorithm>
#include <array>

#include "scs/error.hpp"
#include "scs/text.hpp"

namespace scs {

namespace {

constexpr auto kKotlinModifiers = std::to_array<std::string_view>({
    "public", "private", "protected", "internal", "abstract", "final", "open",
    "sealed", "data", "enum", "annotation", "inner", "companion", "override",
    "suspend", "inline", "infix", "operator", "tailrec", "external", "expect",
    "actual", "const", "lateinit", "value"});

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }

  bool consume(char c) {
    if (peek() != c || done()) return false;
    ++pos_;
    return true;
  }

  std::size_t skip_space() {
    const auto start = pos_;
    while (!done() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    return pos_ - start;
  }

  std::string_view ident() {
    if (done() || !is_ident_start(static_cast<unsigned char>(s_[pos_]))) return {};
    const auto start = pos_;
    while (!done() && is_ident_char(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  // Identifier or Kotlin backtick-quoted name.
  std::string_view name() {
    if (peek() != '`') return ident();
    const auto close = s_.find('`', pos_ + 1);
    if (close == std::string_view::npos) return {};
    auto quoted = s_.substr(pos_ + 1, close - pos_ - 1);
    pos_ = close + 1;
    return quoted;
  }

  // Skips a balanced <...> group starting at the cursor.
  bool skip_angles() {
    int depth = 0;
    while (!done()) {
      const char c = s_[pos_++];
      if (c == '<') ++depth;
      else if (c == '>' && --depth == 0) return true;
    }
    return false;
  }

  void skip_annotation() {
    while (!done() && !is_space(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

bool is_kotlin_modifier(std::string_view word) {
  return std::find(kKotlinModifiers.begin(), kKotlinModifiers.end(), word) !=
         kKotlinModifiers.end();
}

std::optional<Declaration> python_declaration(std::string_view line) {
  Cursor cur(line);
  cur.skip_space();
  const auto keyword = cur.ident();
  SymbolKind kind;
  if (keyword == "def") kind = SymbolKind::Function;
  else if (keyword == "class") kind = SymbolKind::Class;
  else return std::nullopt;
  if (cur.skip_space() == 0) return std::nullopt;
  const auto name = cur.ident();
  if (name.empty()) return std::nullopt;
  return Declaration{std::string(name), kind};
}

// After `fun`: [<T>] [Receiver[<..>][?].]* name
std::optional<Declaration> kotlin_function(Cursor& cur) {
  const bool spaced = cur.skip_space() > 0;
  if (cur.peek() == '<') {
    if (!cur.skip_angles()) return std::nullopt;
    cur.skip_space();
  } else if (!spaced) {
    return std::nullopt;
  }
  auto name = cur.name();
  if (name.empty()) return std::nullopt;
  if (name == "interface") {
    if (cur.skip_space() == 0) return std::nullopt;
    auto iface = cur.ident();
    if (iface.empty()) return std::nullopt;
    return Declaration{std::string(iface), SymbolKind::Class};
  }
  while (true) {
    if (cur.peek() == '<' && !cur.skip_angles()) return std::nullopt;
    cur.consume('?');
    if (!cur.consume('.')) break;
    auto next = cur.name();
    if (next.empty()) return std::nullopt;
    name = next;
  }
  return Declaration{std::string(name), SymbolKind::Function};
}

std::optional<Declaration> kotlin_declaration(std::string_view line) {
  Cursor cur(line);
  while (true) {
    cur.skip_space();
    if (cur.peek() == '@') {
      cur.skip_annotation();
      continue;
    }
    const auto word = cur.ident();
    if (word.empty()) return std::nullopt;
    if (word == "fun") return kotlin_function(cur);
    if (word == "class" || word == "interface" || word == "object") {
      if (cur.skip_space() == 0) return std::nullopt;
      const auto name = cur.name();
      if (name.empty()) return std::nullopt;
      return Declaration{std::string(name), SymbolKind::Class};
    }
    if (!is_kotlin_modifier(word)) return std::nullopt;
  }
}

}  // namespace

std::string_view to_string(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::Function: return "function";
    case SymbolKind::Class: return "class";
    case SymbolKind::Other: break;
  }
  return "other";
}

std::optional<Declaration> match_declaration(std::string_view line, Language lang) {
  switch (lang) {
    case Language::Python: return python_declaration(line);
    case Language::Kotlin: return kotlin_declaration(line);
    case Language::Other: break;
  }
  return std::nullopt;
}

std::vector<SymbolEntry> extract_symbols(std::string_view path, std::string_view content,
                                         Language lang) {
  if (lang == Language::Other) {
    throw UnsupportedLanguage("symbol extraction supports Kotlin and Python only: " +
                              std::string(path));
  }
  std::vector<SymbolEntry> out;
  const auto starts = line_starts(content);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (auto decl = match_declaration(line_at(content, starts, i), lang)) {
      out.push_back(SymbolEntry{std::move(decl->name), decl->kind, std::string(path),
                                static_cast<std::uint32_t>(i + 1)});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const SymbolEntry& a, const SymbolEntry& b) {
    return a.line != b.line ? a.line < b.line : a.name < b.name;
  });
  return out;
}

}  // namespace scs
