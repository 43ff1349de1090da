#include "scs/plan.hpp"

#include <algorithm>

#include "scs/text.hpp"

namespace scs {

TrigramExpr TrigramExpr::leaf(Trigram t) {
  TrigramExpr e;
  e.kind_ = Kind::Leaf;
  e.trigram_ = t;
  return e;
}

TrigramExpr TrigramExpr::conj(std::vector<TrigramExpr> parts) {
  TrigramExpr e;
  for (auto& p : parts) {
    if (p.is_all()) continue;
    if (p.kind_ == Kind::And) {
      for (auto& c : p.children_) e.children_.push_back(std::move(c));
    } else {
      e.children_.push_back(std::move(p));
    }
  }
  if (e.children_.empty()) return all();
  if (e.children_.size() == 1) return std::move(e.children_.front());
  e.kind_ = Kind::And;
  return e;
}

TrigramExpr TrigramExpr::disj(std::vector<TrigramExpr> parts) {
  TrigramExpr e;
  for (auto& p : parts) {
    if (p.is_all()) return all();
    if (p.kind_ == Kind::Or) {
      for (auto& c : p.children_) e.children_.push_back(std::move(c));
    } else {
      e.children_.push_back(std::move(p));
    }
  }
  if (e.children_.empty()) return all();
  if (e.children_.size() == 1) return std::move(e.children_.front());
  e.kind_ = Kind::Or;
  return e;
}

std::vector<Trigram> TrigramExpr::trigrams() const {
  std::vector<Trigram> out;
  if (kind_ == Kind::Leaf) out.push_back(trigram_);
  for (const auto& c : children_) {
    auto sub = c.trigrams();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string TrigramExpr::describe() const {
  switch (kind_) {
    case Kind::All: return "*";
    case Kind::Leaf: return "'" + trigram_.str() + "'";
    case Kind::And:
    case Kind::Or: {
      std::string out = kind_ == Kind::And ? "and(" : "or(";
      for (std::size_t i = 0; i < children_.size(); ++i) {
        if (i) out += ' ';
        out += children_[i].describe();
      }
      return out + ")";
    }
  }
  return "*";
}

namespace {

TrigramExpr literal_requirement(std::string_view text, bool case_sensitive) {
  std::vector<TrigramExpr> parts;
  if (case_sensitive) {
    for (auto t : extract_trigrams(text)) parts.push_back(TrigramExpr::leaf(t));
  } else {
    for (auto t : extract_trigrams(to_lower_ascii(text))) {
      std::vector<TrigramExpr> variants;
      for (auto v : case_variants(t)) variants.push_back(TrigramExpr::leaf(v));
      parts.push_back(TrigramExpr::disj(std::move(variants)));
    }
  }
  return TrigramExpr::conj(std::move(parts));
}

TrigramExpr plan(const QueryNode& node) {
  if (auto t = node.as<TermNode>()) return literal_requirement(t->text, t->case_sensitive);
  if (auto r = node.as<RegexNode>()) {
    std::vector<TrigramExpr> parts;
    for (const auto& lit : r->regex->mandatory_literals()) {
      if (lit.size() >= 3) parts.push_back(literal_requirement(lit, true));
    }
    return TrigramExpr::conj(std::move(parts));
  }
  if (auto a = node.as<AndNode>()) {
    std::vector<TrigramExpr> parts;
    for (const auto& c : a->children) parts.push_back(plan(c));
    return TrigramExpr::conj(std::move(parts));
  }
  if (auto o = node.as<OrNode>()) {
    std::vector<TrigramExpr> parts;
    for (const auto& c : o->children) parts.push_back(plan(c));
    return TrigramExpr::disj(std::move(parts));
  }
  return TrigramExpr::all();
}

}  // namespace

CompiledQuery plan_trigrams(const QueryNode& node) {
  CompiledQuery q{node, plan(node), false};
  q.scan_fallback = q.required.is_all();
  return q;
}

CompiledQuery compile_query(std::string_view text) { return plan_trigrams(parse_query(text)); }

}  // namespace scs
