#include "scs/language.hpp"

#include <algorithm>
#include <array>

namespace scs {

namespace {

constexpr auto kPythonKeywords = std::to_array<std::string_view>({
    "False", "None",   "True",    "and",      "as",       "assert", "async",
    "await", "break",  "class",   "continue", "def",      "del",    "elif",
    "else",  "except", "finally", "for",      "from",     "global", "if",
    "import", "in",    "is",      "lambda",   "nonlocal", "not",    "or",
    "pass",  "raise",  "return",  "try",      "while",    "with",   "yield"});

// Hard keywords, modifier keywords and the soft keywords that never name
// user symbols. get/set/field/value are left out: they are common names.
constexpr auto kKotlinKeywords = std::to_array<std::string_view>({
    "abstract",  "actual",    "annotation", "as",        "break",
    "by",        "catch",     "class",      "companion", "const",
    "constructor", "continue", "crossinline", "data",    "do",
    "dynamic",   "else",      "enum",       "expect",    "external",
    "false",     "final",     "finally",    "for",       "fun",
    "if",        "import",    "in",         "infix",     "init",
    "inline",    "inner",     "interface",  "internal",  "is",
    "lateinit",  "noinline",  "null",       "object",    "open",
    "operator",  "out",       "override",   "package",   "private",
    "protected", "public",    "reified",    "return",    "sealed",
    "super",     "suspend",   "tailrec",    "this",      "throw",
    "true",      "try",       "typealias",  "typeof",    "val",
    "var",       "vararg",    "when",       "where",     "while"});

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& table, std::string_view word) {
  return std::find(table.begin(), table.end(), word) != table.end();
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

Language detect_language(std::string_view path) {
  if (ends_with(path, ".kt") || ends_with(path, ".kts")) return Language::Kotlin;
  if (ends_with(path, ".py") || ends_with(path, ".pyi")) return Language::Python;
  return Language::Other;
}

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::Kotlin: return "kotlin";
    case Language::Python: return "python";
    case Language::Other: break;
  }
  return "other";
}

std::optional<Language> parse_language(std::string_view name) {
  if (name == "kotlin") return Language::Kotlin;
  if (name == "python") return Language::Python;
  if (name == "other") return Language::Other;
  return std::nullopt;
}

bool is_keyword(Language lang, std::string_view word) {
  switch (lang) {
    case Language::Kotlin: return contains(kKotlinKeywords, word);
    case Language::Python: return contains(kPythonKeywords, word);
    case Language::Other: break;
  }
  return false;
}

std::string_view comment_token(Language lang) {
  return lang == Language::Python ? "#" : "//";
}

}  // namespace scs
