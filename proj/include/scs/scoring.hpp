#pragma once

#include <cstddef>

namespace scs {

// Relevance of one matching line:
//   2 * distinct query terms on the line
//   + 3 if a symbol declared on the line matches a query term
//   + 1 / (1 + line_bytes / 100)
double score_match(std::size_t distinct_terms, bool symbol_hit, std::size_t line_bytes);

}  // namespace scs
