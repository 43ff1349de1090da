#include "scs/query.hpp"

#include <optional>

#include "scs/error.hpp"
#include "scs/text.hpp"

namespace scs {

QueryNode QueryNode::term(std::string text, bool case_sensitive) {
  return QueryNode{TermNode{std::move(text), case_sensitive}};
}

QueryNode QueryNode::regex(std::string_view pattern) {
  return QueryNode{RegexNode{std::make_shared<const Regex>(Regex::compile(pattern))}};
}

QueryNode QueryNode::all_of(std::vector<QueryNode> children) {
  return QueryNode{AndNode{std::move(children)}};
}

QueryNode QueryNode::any_of(std::vector<QueryNode> children) {
  return QueryNode{OrNode{std::move(children)}};
}

QueryNode QueryNode::filter(FilterKind kind, std::string argument) {
  return QueryNode{FilterNode{kind, std::move(argument), nullptr}};
}

QueryNode QueryNode::symbol(QueryNode atom) {
  auto text = render_query(atom);
  return QueryNode{FilterNode{FilterKind::Symbol, std::move(text),
                              std::make_shared<const QueryNode>(std::move(atom))}};
}

bool operator==(const QueryNode& a, const QueryNode& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto t = a.as<TermNode>()) {
    auto u = b.as<TermNode>();
    return t->text == u->text && t->case_sensitive == u->case_sensitive;
  }
  if (auto r = a.as<RegexNode>()) return r->pattern() == b.as<RegexNode>()->pattern();
  if (auto x = a.as<AndNode>()) return x->children == b.as<AndNode>()->children;
  if (auto o = a.as<OrNode>()) return o->children == b.as<OrNode>()->children;
  const auto& f = *a.as<FilterNode>();
  const auto& g = *b.as<FilterNode>();
  if (f.kind != g.kind || f.argument != g.argument) return false;
  if (!f.child || !g.child) return !f.child && !g.child;
  return *f.child == *g.child;
}

namespace {

bool bare_stop(char c) {
  return is_space(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '"';
}

struct Token {
  enum Kind { LParen, RParen, Or, Atom, End } kind;
  std::size_t pos;
  std::optional<QueryNode> atom;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    while (pos_ < s_.size() && is_space(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const auto start = pos_;
    if (pos_ >= s_.size()) return {Token::End, start, std::nullopt};
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      return {Token::LParen, start, std::nullopt};
    }
    if (c == ')') {
      ++pos_;
      return {Token::RParen, start, std::nullopt};
    }
    const auto word = peek_word();
    if (word == "or") {
      pos_ += 2;
      return {Token::Or, start, std::nullopt};
    }
    return {Token::Atom, start, atom()};
  }

 private:
  std::string_view peek_word() const {
    auto end = pos_;
    while (end < s_.size() && !bare_stop(s_[end])) ++end;
    return s_.substr(pos_, end - pos_);
  }

  bool starts_with(std::string_view prefix) const { return s_.substr(pos_, prefix.size()) == prefix; }

  QueryNode atom() {
    const auto start = pos_;
    const char c = s_[pos_];
    if (c == '"') return QueryNode::term(phrase(), true);
    if (c == '/') return regex();
    struct Prefix {
      std::string_view text;
      FilterKind kind;
    };
    static constexpr Prefix kPrefixes[] = {{"repo:", FilterKind::Repo},
                                           {"rev:", FilterKind::Revision},
                                           {"file:", FilterKind::File},
                                           {"sym:", FilterKind::Symbol}};
    for (const auto& p : kPrefixes) {
      if (!starts_with(p.text)) continue;
      pos_ += p.text.size();
      if (p.kind == FilterKind::Symbol) {
        if (pos_ >= s_.size() || (bare_stop(s_[pos_]) && s_[pos_] != '"')) {
          throw ParseError(start, "sym: needs a term or regex");
        }
        return QueryNode::symbol(atom_for_symbol(start));
      }
      std::string arg;
      if (pos_ < s_.size() && s_[pos_] == '"') {
        arg = phrase();
      } else {
        arg = std::string(peek_word());
        pos_ += arg.size();
      }
      if (arg.empty()) throw ParseError(start, "missing filter argument");
      return QueryNode::filter(p.kind, std::move(arg));
    }
    auto word = peek_word();
    pos_ += word.size();
    return QueryNode::term(std::string(word), false);
  }

  QueryNode atom_for_symbol(std::size_t start) {
    const char c = s_[pos_];
    if (c == '"') return QueryNode::term(phrase(), true);
    if (c == '/') return regex();
    auto word = peek_word();
    if (word.find(':') != std::string_view::npos &&
        (word.starts_with("repo:") || word.starts_with("rev:") || word.starts_with("file:") ||
         word.starts_with("sym:"))) {
      throw ParseError(start, "sym: wraps a term or regex only");
    }
    pos_ += word.size();
    return QueryNode::term(std::string(word), false);
  }

  // Quoted phrase; \" and \\ are escapes, other backslashes are literal.
  std::string phrase() {
    const auto open = pos_++;
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) throw ParseError(open, "unbalanced quote");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\' && pos_ < s_.size() && (s_[pos_] == '"' || s_[pos_] == '\\')) {
        out.push_back(s_[pos_++]);
        continue;
      }
      out.push_back(c);
    }
    if (out.empty()) throw ParseError(open, "empty phrase");
    return out;
  }

  // /pattern/; \/ is an escaped slash, other escapes pass to the regex.
  QueryNode regex() {
    const auto open = pos_++;
    std::string pattern;
    while (true) {
      if (pos_ >= s_.size()) throw ParseError(open, "unterminated regex");
      const char c = s_[pos_++];
      if (c == '/') break;
      if (c == '\\' && pos_ < s_.size()) {
        if (s_[pos_] == '/') {
          pattern.push_back('/');
        } else {
          pattern.push_back('\\');
          pattern.push_back(s_[pos_]);
        }
        ++pos_;
        continue;
      }
      pattern.push_back(c);
    }
    try {
      return QueryNode::regex(pattern);
    } catch (const ParseError& e) {
      throw ParseError(open + 1 + e.position(), e.detail());
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view s) : lex_(s) { advance(); }

  QueryNode parse() {
    if (tok_.kind == Token::End) throw ParseError(0, "empty query");
    auto q = query();
    if (tok_.kind == Token::RParen) throw ParseError(tok_.pos, "unbalanced ')'");
    if (tok_.kind != Token::End) throw ParseError(tok_.pos, "unexpected token");
    return q;
  }

 private:
  void advance() { tok_ = lex_.next(); }

  QueryNode query() {
    std::vector<QueryNode> alts;
    alts.push_back(group());
    while (tok_.kind == Token::Or) {
      advance();
      alts.push_back(group());
    }
    if (alts.size() == 1) return std::move(alts.front());
    std::vector<QueryNode> flat;
    for (auto& a : alts) {
      if (auto o = a.as<OrNode>()) {
        for (auto& k : o->children) flat.push_back(k);
      } else {
        flat.push_back(std::move(a));
      }
    }
    return QueryNode::any_of(std::move(flat));
  }

  QueryNode group() {
    std::vector<QueryNode> units;
    while (tok_.kind == Token::Atom || tok_.kind == Token::LParen) units.push_back(unit());
    if (units.empty()) {
      throw ParseError(tok_.pos, tok_.kind == Token::Or ? "'or' needs an operand on both sides"
                                 : tok_.kind == Token::RParen ? "empty group"
                                                              : "missing operand");
    }
    if (units.size() == 1) return std::move(units.front());
    std::vector<QueryNode> flat;
    for (auto& u : units) {
      if (auto a = u.as<AndNode>()) {
        for (auto& k : a->children) flat.push_back(k);
      } else {
        flat.push_back(std::move(u));
      }
    }
    return QueryNode::all_of(std::move(flat));
  }

  QueryNode unit() {
    if (tok_.kind == Token::LParen) {
      const auto open = tok_.pos;
      advance();
      if (tok_.kind == Token::RParen) throw ParseError(open, "empty parentheses");
      auto inner = query();
      if (tok_.kind != Token::RParen) throw ParseError(open, "unbalanced '('");
      advance();
      return inner;
    }
    auto node = std::move(*tok_.atom);
    if (auto f = node.as<FilterNode>(); f && f->kind == FilterKind::Revision) {
      if (saw_revision_) throw ParseError(tok_.pos, "at most one rev: filter per query");
      saw_revision_ = true;
    }
    advance();
    return node;
  }

  Lexer lex_;
  Token tok_{Token::End, 0, std::nullopt};
  bool saw_revision_ = false;
};

bool bare_safe(std::string_view text) {
  if (text.empty() || text == "or" || text.front() == '/') return false;
  for (auto p : {"repo:", "rev:", "file:", "sym:"}) {
    if (text.starts_with(p)) return false;
  }
  for (char c : text) {
    if (bare_stop(c)) return false;
  }
  return true;
}

std::string render_regex(std::string_view pattern) {
  std::string out = "/";
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '\\' && i + 1 < pattern.size()) {
      out.push_back('\\');
      out.push_back(pattern[++i]);
    } else if (pattern[i] == '/') {
      out += "\\/";
    } else {
      out.push_back(pattern[i]);
    }
  }
  out.push_back('/');
  return out;
}

std::string_view filter_prefix(FilterKind kind) {
  switch (kind) {
    case FilterKind::Repo: return "repo:";
    case FilterKind::Revision: return "rev:";
    case FilterKind::File: return "file:";
    case FilterKind::Symbol: break;
  }
  return "sym:";
}

}  // namespace

std::string quote_phrase(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

QueryNode parse_query(std::string_view input) { return Parser(input).parse(); }

std::string render_query(const QueryNode& q) {
  if (auto t = q.as<TermNode>()) {
    return t->case_sensitive || !bare_safe(t->text) ? quote_phrase(t->text) : t->text;
  }
  if (auto r = q.as<RegexNode>()) return render_regex(r->pattern());
  if (auto a = q.as<AndNode>()) {
    std::string out;
    for (const auto& k : a->children) {
      if (!out.empty()) out.push_back(' ');
      out += k.as<OrNode>() ? "(" + render_query(k) + ")" : render_query(k);
    }
    return out;
  }
  if (auto o = q.as<OrNode>()) {
    std::string out;
    for (const auto& k : o->children) {
      if (!out.empty()) out += " or ";
      out += render_query(k);
    }
    return out;
  }
  const auto& f = *q.as<FilterNode>();
  if (f.child) return std::string(filter_prefix(f.kind)) + render_query(*f.child);
  return std::string(filter_prefix(f.kind)) +
         (bare_safe(f.argument) ? f.argument : quote_phrase(f.argument));
}

}  // namespace scs
