#pragma once

#include <string>
#include <vector>

#include "scs/query.hpp"
#include "scs/trigram.hpp"

namespace scs {

// Boolean requirement over trigram presence in a file. All means "no
// constraint"; a file lacking the requirement provably cannot match.
class TrigramExpr {
 public:
  enum class Kind { All, Leaf, And, Or };

  static TrigramExpr all() { return TrigramExpr(); }
  static TrigramExpr leaf(Trigram t);
  static TrigramExpr conj(std::vector<TrigramExpr> parts);  // simplifies
  static TrigramExpr disj(std::vector<TrigramExpr> parts);  // simplifies

  Kind kind() const { return kind_; }
  bool is_all() const { return kind_ == Kind::All; }
  Trigram trigram() const { return trigram_; }
  const std::vector<TrigramExpr>& children() const { return children_; }

  // Every trigram named in the expression, sorted and distinct.
  std::vector<Trigram> trigrams() const;

  // has(Trigram) -> bool
  template <typename Has>
  bool holds(Has&& has) const {
    switch (kind_) {
      case Kind::All: return true;
      case Kind::Leaf: return has(trigram_);
      case Kind::And:
        for (const auto& c : children_) if (!c.holds(has)) return false;
        return true;
      case Kind::Or:
        for (const auto& c : children_) if (c.holds(has)) return true;
        return false;
    }
    return true;
  }

  std::string describe() const;

 private:
  Kind kind_ = Kind::All;
  Trigram trigram_;
  std::vector<TrigramExpr> children_;
};

struct CompiledQuery {
  QueryNode tree;
  TrigramExpr required;
  // True when no trigram constraint exists and every file must be scanned.
  bool scan_fallback = true;
};

// Term: conjunction of its trigrams (case-insensitive terms accept any ASCII
// case variant of each). And intersects, Or unions. Regex: conjunction of the
// trigrams of its mandatory literal runs of at least 3 bytes. Filters add no
// content trigrams.
CompiledQuery plan_trigrams(const QueryNode& node);

CompiledQuery compile_query(std::string_view text);  // parse + plan

}  // namespace scs
