#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scs/regex.hpp"

namespace scs {

enum class FilterKind { Repo, Revision, File, Symbol };

struct QueryNode;

struct TermNode {
  std::string text;
  bool case_sensitive = false;
};

struct RegexNode {
  std::shared_ptr<const Regex> regex;
  const std::string& pattern() const { return regex->pattern(); }
};

struct AndNode {
  std::vector<QueryNode> children;
};

struct OrNode {
  std::vector<QueryNode> children;
};

// repo:/rev:/file: carry only an argument; sym: wraps one Term or Regex that
// is matched against symbol names instead of file content.
struct FilterNode {
  FilterKind kind = FilterKind::Repo;
  std::string argument;
  std::shared_ptr<const QueryNode> child;
};

struct QueryNode {
  std::variant<TermNode, RegexNode, AndNode, OrNode, FilterNode> node;

  static QueryNode term(std::string text, bool case_sensitive);
  static QueryNode regex(std::string_view pattern);  // throws ParseError
  static QueryNode all_of(std::vector<QueryNode> children);
  static QueryNode any_of(std::vector<QueryNode> children);
  static QueryNode filter(FilterKind kind, std::string argument);
  static QueryNode symbol(QueryNode atom);

  template <typename T>
  const T* as() const { return std::get_if<T>(&node); }
};

bool operator==(const QueryNode& a, const QueryNode& b);

// Query grammar:
//   query  := group ("or" group)*          `or` binds loosest
//   group  := unit+                          juxtaposition is AND
//   unit   := "(" query ")" | atom
//   atom   := word | "phrase" | /regex/ | repo:arg | rev:arg | file:arg | sym:atom
// Bare words are case-insensitive, quoted phrases exact. Nested AND/OR of the
// same kind are flattened. Throws ParseError with a byte position.
QueryNode parse_query(std::string_view input);

// Canonical text; parse_query(render_query(q)) == q for parsed trees.
std::string render_query(const QueryNode& q);

std::string quote_phrase(std::string_view text);

}  // namespace scs
