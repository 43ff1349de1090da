#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scs/language.hpp"

namespace scs {

// One benchmark datapoint: a file split at the completion location.
struct CompletionPoint {
  std::string id;
  std::string repo_id;
  std::string revision_id;
  std::string path;
  std::string prefix;
  std::string suffix;
};

struct ModifiedText {
  std::string text;
  std::uint32_t completion_line = 1;  // 1 + newlines in prefix
};

ModifiedText reconstruct_modified(const CompletionPoint& cp);

enum class DiffOrigin : std::uint8_t { Added, Removed, ContextWindow };

struct DiffLine {
  std::string text;
  DiffOrigin origin = DiffOrigin::ContextWindow;
  std::optional<std::uint32_t> modified_line_no;  // absent for Removed
  // Line in the modified file used for proximity; Removed lines take the
  // next kept line (or one past the end).
  std::uint32_t anchor_line = 1;
};

struct DiffContext {
  std::vector<DiffLine> lines;
  std::uint32_t completion_line = 1;
};

inline constexpr std::uint32_t kDiffContextLines = 3;

// Minimal line diff of original -> modified with 3 unchanged lines of context
// around each hunk. Without any edit, the 7-line window centred on the
// completion line stands in for the diff.
DiffContext compute_diff(std::string_view original, std::string_view modified,
                         std::uint32_t completion_line);

// Identifiers at a declaration or directly before '(' (call position).
std::vector<std::string> gather_functions_classes(const DiffContext& diff, Language lang);

// Maximal dotted chains a.b.c; with unpack, their component identifiers
// (keywords dropped).
std::vector<std::string> gather_navigation(const DiffContext& diff, Language lang, bool unpack);

// Every identifier that is not a keyword of `lang`.
std::vector<std::string> gather_identifiers(const DiffContext& diff, Language lang);

enum class IdentifierKind : std::uint8_t { FunctionOrClass, Navigation, Identifier };

struct RankedIdentifier {
  std::string name;
  IdentifierKind kind = IdentifierKind::Identifier;
  std::uint32_t frequency = 1;  // occurrences in the diff lines
  std::uint32_t proximity = 0;  // min |anchor line - completion line|

  friend bool operator==(const RankedIdentifier&, const RankedIdentifier&) = default;
};

// Sorted by frequency desc, proximity asc, name asc. Dotted names count as
// occurrences of the whole chain. Throws std::invalid_argument for a name
// that never occurs in the diff.
std::vector<RankedIdentifier> rank_identifiers(const std::vector<std::string>& names,
                                               const DiffContext& diff, Language lang,
                                               IdentifierKind kind);

// The four ranked term families the query ladder draws from.
struct MinedTerms {
  std::vector<RankedIdentifier> functions_classes;
  std::vector<RankedIdentifier> navigation;           // whole chains
  std::vector<RankedIdentifier> navigation_unpacked;  // chain components
  std::vector<RankedIdentifier> identifiers;
};

MinedTerms mine_terms(const DiffContext& diff, Language lang);

}  // namespace scs
