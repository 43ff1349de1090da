#include "scs/scoring.hpp"

namespace scs {

double score_match(std::size_t distinct_terms, bool symbol_hit, std::size_t line_bytes) {
  return 2.0 * static_cast<double>(distinct_terms) + (symbol_hit ? 3.0 : 0.0) +
         1.0 / (1.0 + static_cast<double>(line_bytes) / 100.0);
}

}  // namespace scs
