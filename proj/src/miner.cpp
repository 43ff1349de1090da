#include "scs/miner.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "scs/diff.hpp"
#include "scs/symbols.hpp"
#include "scs/text.hpp"

namespace scs {

ModifiedText reconstruct_modified(const CompletionPoint& cp) {
  ModifiedText out;
  out.text.reserve(cp.prefix.size() + cp.suffix.size());
  out.text.append(cp.prefix);
  out.text.append(cp.suffix);
  out.completion_line =
      1 + static_cast<std::uint32_t>(std::count(cp.prefix.begin(), cp.prefix.end(), '\n'));
  return out;
}

DiffContext compute_diff(std::string_view original, std::string_view modified,
                         std::uint32_t completion_line) {
  const auto old_lines = split_lines(original);
  const auto new_lines = split_lines(modified);
  const auto edits = diff_sequences(old_lines, new_lines);
  const auto new_count = static_cast<std::uint32_t>(new_lines.size());

  DiffContext ctx;
  ctx.completion_line = completion_line;
  const bool changed = std::any_of(edits.begin(), edits.end(),
                                   [](const Edit& e) { return e.kind != EditKind::Keep; });
  if (!changed) {
    if (new_count == 0) return ctx;
    const auto lo = completion_line > kDiffContextLines ? completion_line - kDiffContextLines : 1u;
    const auto hi = std::min(new_count, completion_line + kDiffContextLines);
    for (auto line = lo; line <= hi; ++line) {
      ctx.lines.push_back(DiffLine{std::string(new_lines[line - 1]), DiffOrigin::ContextWindow,
                                   line, line});
    }
    return ctx;
  }

  // Keep lines within kDiffContextLines of a change on either side.
  std::vector<bool> include(edits.size(), false);
  std::uint32_t since = kDiffContextLines + 1;
  for (std::size_t i = 0; i < edits.size(); ++i) {
    if (edits[i].kind != EditKind::Keep) {
      include[i] = true;
      since = 0;
    } else if (++since <= kDiffContextLines) {
      include[i] = true;
    }
  }
  since = kDiffContextLines + 1;
  for (std::size_t i = edits.size(); i-- > 0;) {
    if (edits[i].kind != EditKind::Keep) since = 0;
    else if (++since <= kDiffContextLines) include[i] = true;
  }

  // Anchor for Removed lines: the next line that exists in the new text.
  std::vector<std::uint32_t> next_new(edits.size() + 1, new_count + 1);
  for (std::size_t i = edits.size(); i-- > 0;) {
    next_new[i] = edits[i].kind == EditKind::Delete ? next_new[i + 1] : edits[i].b + 1;
  }

  for (std::size_t i = 0; i < edits.size(); ++i) {
    if (!include[i]) continue;
    const auto& e = edits[i];
    switch (e.kind) {
      case EditKind::Keep:
        ctx.lines.push_back(DiffLine{std::string(new_lines[e.b]), DiffOrigin::ContextWindow, e.b + 1, e.b + 1});
        break;
      case EditKind::Insert:
        ctx.lines.push_back(DiffLine{std::string(new_lines[e.b]), DiffOrigin::Added, e.b + 1, e.b + 1});
        break;
      case EditKind::Delete:
        ctx.lines.push_back(DiffLine{std::string(old_lines[e.a]), DiffOrigin::Removed, std::nullopt, next_new[i]});
        break;
    }
  }
  return ctx;
}

namespace {

struct Token {
  enum Kind { Ident, Dot, LParen, Other } kind;
  std::string_view text;
  std::size_t begin;
  std::size_t end;
};

// Code tokens of one line. String literal bodies and line comments are
// skipped; numbers are consumed whole so 0x1F does not yield an identifier.
std::vector<Token> lex_line(std::string_view line, Language lang) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(line[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    if ((c == '#' && lang == Language::Python) ||
        (c == '/' && i + 1 < n && line[i + 1] == '/' && lang != Language::Python)) {
      break;
    }
    if (c == '"' || c == '\'') {
      const std::string_view triple = line.substr(i, 3);
      if (triple.size() == 3 && triple[1] == static_cast<char>(c) && triple[2] == static_cast<char>(c)) {
        const auto close = line.find(triple, i + 3);
        i = close == std::string_view::npos ? n : close + 3;
      } else {
        std::size_t j = i + 1;
        while (j < n && line[j] != static_cast<char>(c)) j += line[j] == '\\' ? 2 : 1;
        i = std::min(n, j + 1);
      }
      out.push_back({Token::Other, line.substr(0, 0), i, i});
      continue;
    }
    if (c >= '0' && c <= '9') {
      while (i < n && (is_ident_char(static_cast<unsigned char>(line[i])) ||
                       (line[i] == '.' && i + 1 < n && line[i + 1] >= '0' && line[i + 1] <= '9'))) {
        ++i;
      }
      out.push_back({Token::Other, line.substr(0, 0), i, i});
      continue;
    }
    if (is_ident_start(c)) {
      const auto start = i;
      while (i < n && is_ident_char(static_cast<unsigned char>(line[i]))) ++i;
      out.push_back({Token::Ident, line.substr(start, i - start), start, i});
      continue;
    }
    const Token::Kind kind = c == '.' ? Token::Dot : c == '(' ? Token::LParen : Token::Other;
    out.push_back({kind, line.substr(i, 1), i, i + 1});
    ++i;
  }
  return out;
}

struct Chain {
  std::vector<std::string_view> parts;
  std::string text() const {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) out.push_back('.');
      out.append(parts[i]);
    }
    return out;
  }
};

// Maximal runs Ident (Dot Ident)+ with no gaps between tokens.
std::vector<Chain> chains_in(const std::vector<Token>& toks) {
  std::vector<Chain> out;
  for (std::size_t i = 0; i < toks.size();) {
    if (toks[i].kind != Token::Ident) {
      ++i;
      continue;
    }
    Chain chain{{toks[i].text}};
    auto j = i;
    while (j + 2 < toks.size() && toks[j + 1].kind == Token::Dot && toks[j + 2].kind == Token::Ident &&
           toks[j].end == toks[j + 1].begin && toks[j + 1].end == toks[j + 2].begin) {
      chain.parts.push_back(toks[j + 2].text);
      j += 2;
    }
    if (chain.parts.size() >= 2) out.push_back(std::move(chain));
    i = j + 1;
  }
  return out;
}

class OrderedSet {
 public:
  void add(std::string name) {
    if (seen_.insert(name).second) items_.push_back(std::move(name));
  }
  std::vector<std::string> take() { return std::move(items_); }

 private:
  std::unordered_set<std::string> seen_;
  std::vector<std::string> items_;
};

bool is_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return is_ident_char(static_cast<unsigned char>(c)); });
}

}  // namespace

std::vector<std::string> gather_functions_classes(const DiffContext& diff, Language lang) {
  OrderedSet names;
  for (const auto& line : diff.lines) {
    if (auto decl = match_declaration(line.text, lang)) {
      if (is_identifier(decl->name) && !is_keyword(lang, decl->name)) names.add(decl->name);
    }
    const auto toks = lex_line(line.text, lang);
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
      if (toks[i].kind == Token::Ident && toks[i + 1].kind == Token::LParen &&
          toks[i].end == toks[i + 1].begin && !is_keyword(lang, toks[i].text)) {
        names.add(std::string(toks[i].text));
      }
    }
  }
  return names.take();
}

std::vector<std::string> gather_navigation(const DiffContext& diff, Language lang, bool unpack) {
  OrderedSet names;
  for (const auto& line : diff.lines) {
    for (const auto& chain : chains_in(lex_line(line.text, lang))) {
      if (!unpack) {
        names.add(chain.text());
        continue;
      }
      for (auto part : chain.parts) {
        if (!is_keyword(lang, part)) names.add(std::string(part));
      }
    }
  }
  return names.take();
}

std::vector<std::string> gather_identifiers(const DiffContext& diff, Language lang) {
  OrderedSet names;
  for (const auto& line : diff.lines) {
    for (const auto& tok : lex_line(line.text, lang)) {
      if (tok.kind == Token::Ident && !is_keyword(lang, tok.text)) names.add(std::string(tok.text));
    }
  }
  return names.take();
}

std::vector<RankedIdentifier> rank_identifiers(const std::vector<std::string>& names,
                                               const DiffContext& diff, Language lang,
                                               IdentifierKind kind) {
  struct LineTokens {
    std::vector<Token> tokens;
    std::vector<std::string> chains;
    std::uint32_t anchor;
  };
  std::vector<LineTokens> lines;
  lines.reserve(diff.lines.size());
  for (const auto& line : diff.lines) {
    LineTokens lt{lex_line(line.text, lang), {}, line.anchor_line};
    for (const auto& c : chains_in(lt.tokens)) lt.chains.push_back(c.text());
    lines.push_back(std::move(lt));
  }

  std::vector<RankedIdentifier> out;
  out.reserve(names.size());
  for (const auto& name : names) {
    const bool dotted = name.find('.') != std::string::npos;
    std::uint32_t frequency = 0;
    std::uint32_t proximity = UINT32_MAX;
    for (const auto& lt : lines) {
      std::uint32_t here = 0;
      if (dotted) {
        here = static_cast<std::uint32_t>(std::count(lt.chains.begin(), lt.chains.end(), name));
      } else {
        for (const auto& tok : lt.tokens) here += tok.kind == Token::Ident && tok.text == name;
      }
      if (here == 0) continue;
      frequency += here;
      const auto distance = lt.anchor > diff.completion_line ? lt.anchor - diff.completion_line
                                                             : diff.completion_line - lt.anchor;
      proximity = std::min(proximity, distance);
    }
    if (frequency == 0) throw std::invalid_argument("name does not occur in the diff: " + name);
    out.push_back(RankedIdentifier{name, kind, frequency, proximity});
  }
  std::sort(out.begin(), out.end(), [](const RankedIdentifier& a, const RankedIdentifier& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    if (a.proximity != b.proximity) return a.proximity < b.proximity;
    return a.name < b.name;
  });
  return out;
}

MinedTerms mine_terms(const DiffContext& diff, Language lang) {
  MinedTerms m;
  m.functions_classes = rank_identifiers(gather_functions_classes(diff, lang), diff, lang,
                                         IdentifierKind::FunctionOrClass);
  m.navigation = rank_identifiers(gather_navigation(diff, lang, false), diff, lang,
                                  IdentifierKind::Navigation);
  m.navigation_unpacked = rank_identifiers(gather_navigation(diff, lang, true), diff, lang,
                                           IdentifierKind::Navigation);
  m.identifiers = rank_identifiers(gather_identifiers(diff, lang), diff, lang, IdentifierKind::Identifier);
  return m;
}

}  // namespace scs
