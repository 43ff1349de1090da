#pragma once

#include <optional>
#include <string_view>

namespace scs {

enum class Language : unsigned char { Kotlin = 0, Python = 1, Other = 2 };

// Guesses the language from the file extension (.kt/.kts, .py/.pyi).
Language detect_language(std::string_view path);

std::string_view to_string(Language lang);
std::optional<Language> parse_language(std::string_view name);

// True when `word` is reserved in `lang`. Other has no keywords.
bool is_keyword(Language lang, std::string_view word);

// Line-comment token used for headers in rendered context.
std::string_view comment_token(Language lang);

}  // namespace scs
