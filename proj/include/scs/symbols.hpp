#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scs/language.hpp"

namespace scs {

enum class SymbolKind : unsigned char { Function = 0, Class = 1, Other = 2 };

std::string_view to_string(SymbolKind kind);

struct SymbolEntry {
  std::string name;
  SymbolKind kind = SymbolKind::Other;
  std::string path;
  std::uint32_t line = 1;  // 1-based

  friend bool operator==(const SymbolEntry&, const SymbolEntry&) = default;
};

struct Declaration {
  std::string name;
  SymbolKind kind;
};

// Lexical declaration rules, one line at a time.
//   Python: [indent] def <ident> | [indent] class <ident>
//   Kotlin: [modifiers] fun [<..>] [Receiver.]<ident> |
//           [modifiers] (class|interface|object) <ident>
std::optional<Declaration> match_declaration(std::string_view line, Language lang);

// One entry per declaration, ordered by (line, name).
// Throws UnsupportedLanguage for Language::Other.
std::vector<SymbolEntry> extract_symbols(std::string_view path, std::string_view content,
                                         Language lang);

}  // namespace scs
