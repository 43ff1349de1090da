#include "scs/search.hpp"

#include <algorithm>
#include <map>

#include "scs/scoring.hpp"
#include "scs/text.hpp"

namespace scs {

bool result_before(const SearchResult& a, const SearchResult& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.path != b.path) return a.path < b.path;
  if (a.line_start != b.line_start) return a.line_start < b.line_start;
  if (a.repo_id != b.repo_id) return a.repo_id < b.repo_id;
  return a.revision_id < b.revision_id;
}

namespace {

// Dense bitset over file indices.
class FileSet {
 public:
  explicit FileSet(std::size_t n, bool full = false)
      : n_(n), words_((n + 63) / 64, full ? ~std::uint64_t{0} : 0) {
    trim();
  }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void intersect(const FileSet& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
  }
  void unite(const FileSet& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
  }
  std::vector<std::uint32_t> members() const {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < n_; ++i) {
      if (test(i)) out.push_back(static_cast<std::uint32_t>(i));
    }
    return out;
  }

 private:
  void trim() {
    if (n_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
  }
  std::size_t n_;
  std::vector<std::uint64_t> words_;
};

FileSet candidates(const Shard& shard, const TrigramExpr& expr) {
  const auto n = shard.files().size();
  switch (expr.kind()) {
    case TrigramExpr::Kind::All: return FileSet(n, true);
    case TrigramExpr::Kind::Leaf: {
      FileSet s(n);
      const auto list = shard.postings(expr.trigram());
      // Postings are sorted by file; jump over each file's run.
      for (std::size_t i = 0; i < list.size();) {
        const auto f = list[i].file;
        s.set(f);
        while (i < list.size() && list[i].file == f) ++i;
      }
      return s;
    }
    case TrigramExpr::Kind::And: {
      FileSet s(n, true);
      for (const auto& c : expr.children()) s.intersect(candidates(shard, c));
      return s;
    }
    case TrigramExpr::Kind::Or: {
      FileSet s(n);
      for (const auto& c : expr.children()) s.unite(candidates(shard, c));
      return s;
    }
  }
  return FileSet(n, true);
}

struct Atom {
  enum Kind { Term, Regex, Symbol } kind;
  const TermNode* term = nullptr;
  const RegexNode* regex = nullptr;
  std::string folded;  // lowercase text for case-insensitive terms
  // For Symbol atoms, the wrapped atom used to match names.
  const QueryNode* name_matcher = nullptr;
};

struct EvalNode {
  enum Kind { AtomRef, And, Or, Filter } kind;
  std::size_t atom = 0;
  FilterKind filter = FilterKind::Repo;
  const std::string* argument = nullptr;
  std::vector<EvalNode> kids;
};

class Program {
 public:
  explicit Program(const QueryNode& tree) : root_(build(tree)) {}

  const EvalNode& root() const { return root_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

 private:
  std::size_t intern(Atom atom, std::string key) {
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      if (keys_[i] == key) return i;
    }
    keys_.push_back(std::move(key));
    atoms_.push_back(std::move(atom));
    return atoms_.size() - 1;
  }

  EvalNode build(const QueryNode& q) {
    if (auto t = q.as<TermNode>()) {
      Atom a{Atom::Term, t, nullptr, t->case_sensitive ? "" : to_lower_ascii(t->text), nullptr};
      return EvalNode{EvalNode::AtomRef, intern(std::move(a), "t:" + render_query(q)), {}, nullptr, {}};
    }
    if (auto r = q.as<RegexNode>()) {
      return EvalNode{EvalNode::AtomRef, intern(Atom{Atom::Regex, nullptr, r, "", nullptr}, "r:" + r->pattern()),
                      {}, nullptr, {}};
    }
    if (auto a = q.as<AndNode>()) {
      EvalNode n{EvalNode::And, 0, {}, nullptr, {}};
      for (const auto& c : a->children) n.kids.push_back(build(c));
      return n;
    }
    if (auto o = q.as<OrNode>()) {
      EvalNode n{EvalNode::Or, 0, {}, nullptr, {}};
      for (const auto& c : o->children) n.kids.push_back(build(c));
      return n;
    }
    const auto& f = *q.as<FilterNode>();
    if (f.kind == FilterKind::Symbol && f.child) {
      Atom a{Atom::Symbol, nullptr, nullptr, "", f.child.get()};
      return EvalNode{EvalNode::AtomRef, intern(std::move(a), "s:" + render_query(*f.child)), {}, nullptr, {}};
    }
    return EvalNode{EvalNode::Filter, 0, f.kind, &f.argument, {}};
  }

  std::vector<Atom> atoms_;
  std::vector<std::string> keys_;
  EvalNode root_;
};

bool equals_folded(std::string_view a, std::string_view lower) {
  if (a.size() != lower.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ascii_lower(a[i]) != lower[i]) return false;
  }
  return true;
}

// Name matching used by sym: atoms and the symbol-line bonus.
bool matches_name(const QueryNode& q, std::string_view name) {
  if (auto t = q.as<TermNode>()) {
    return t->case_sensitive ? name == t->text : equals_folded(name, to_lower_ascii(t->text));
  }
  if (auto r = q.as<RegexNode>()) return r->regex->search(name);
  return false;
}

bool atom_matches_name(const Atom& a, std::string_view name) {
  switch (a.kind) {
    case Atom::Term:
      return a.term->case_sensitive ? name == a.term->text : equals_folded(name, a.folded);
    case Atom::Regex: return a.regex->regex->search(name);
    case Atom::Symbol: return matches_name(*a.name_matcher, name);
  }
  return false;
}

// Lines (0-based, ascending, distinct) of `file` hit by `atom`.
std::vector<std::uint32_t> atom_lines(const Shard& shard, std::size_t file, const Atom& atom) {
  const auto& rec = shard.files()[file];
  std::vector<std::uint32_t> lines;
  auto collect_occurrences = [&](std::string_view haystack, std::string_view needle,
                                 auto&& accept) {
    std::size_t from = 0;
    while (from < haystack.size()) {
      const auto hit = haystack.find(needle, from);
      if (hit == std::string_view::npos) break;
      const auto line = rec.line_of(hit);
      if (accept(line)) lines.push_back(static_cast<std::uint32_t>(line));
      from = line + 1 < rec.line_count() ? rec.line_offsets[line + 1] : haystack.size();
    }
  };
  switch (atom.kind) {
    case Atom::Term: {
      const auto& text = atom.term->text;
      if (text.empty() || text.find('\n') != std::string::npos) break;
      if (atom.term->case_sensitive) {
        collect_occurrences(rec.content, text, [](std::size_t) { return true; });
      } else {
        collect_occurrences(shard.folded_content(file), atom.folded, [](std::size_t) { return true; });
      }
      break;
    }
    case Atom::Regex: {
      const auto& re = *atom.regex->regex;
      std::string_view longest;
      for (const auto& lit : re.mandatory_literals()) {
        if (lit.size() > longest.size()) longest = lit;
      }
      if (!longest.empty() && longest.find('\n') == std::string_view::npos) {
        collect_occurrences(rec.content, longest,
                            [&](std::size_t line) { return re.search(rec.line(line)); });
      } else {
        for (std::size_t line = 0; line < rec.line_count(); ++line) {
          if (re.search(rec.line(line))) lines.push_back(static_cast<std::uint32_t>(line));
        }
      }
      break;
    }
    case Atom::Symbol: {
      for (const auto& sym : shard.file_symbols(file)) {
        if (matches_name(*atom.name_matcher, sym.name)) lines.push_back(sym.line - 1);
      }
      lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
      break;
    }
  }
  return lines;
}

bool evaluate(const EvalNode& n, const Shard& shard, const FileRecord& rec,
              const std::vector<std::vector<std::uint32_t>>& hits) {
  switch (n.kind) {
    case EvalNode::AtomRef: return !hits[n.atom].empty();
    case EvalNode::And:
      for (const auto& k : n.kids) if (!evaluate(k, shard, rec, hits)) return false;
      return true;
    case EvalNode::Or:
      for (const auto& k : n.kids) if (evaluate(k, shard, rec, hits)) return true;
      return false;
    case EvalNode::Filter:
      switch (n.filter) {
        case FilterKind::Repo: return shard.meta().repo_id == *n.argument;
        case FilterKind::Revision: return shard.meta().revision_id == *n.argument;
        case FilterKind::File: return rec.path.find(*n.argument) != std::string::npos;
        case FilterKind::Symbol: return false;  // sym: always carries an atom
      }
  }
  return false;
}

std::vector<SearchResult> verify_file(const Shard& shard, const Program& program, std::size_t file) {
  const auto& atoms = program.atoms();
  const auto& rec = shard.files()[file];
  std::vector<std::vector<std::uint32_t>> hits(atoms.size());
  for (std::size_t a = 0; a < atoms.size(); ++a) hits[a] = atom_lines(shard, file, atoms[a]);
  if (!evaluate(program.root(), shard, rec, hits)) return {};

  // line -> distinct content terms on it
  std::map<std::uint32_t, std::size_t> lines;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const bool content = atoms[a].kind != Atom::Symbol;
    for (auto line : hits[a]) lines[line] += content ? 1 : 0;
  }
  const auto symbols = shard.file_symbols(file);
  std::vector<SearchResult> out;
  out.reserve(lines.size());
  for (const auto& [line, terms] : lines) {
    bool symbol_hit = false;
    for (const auto& sym : symbols) {
      if (sym.line != line + 1) continue;
      for (const auto& atom : atoms) {
        if (atom_matches_name(atom, sym.name)) {
          symbol_hit = true;
          break;
        }
      }
      if (symbol_hit) break;
    }
    const auto text = rec.line(line);
    out.push_back(SearchResult{shard.meta().repo_id, shard.meta().revision_id, rec.path, line + 1,
                               line + 1, score_match(terms, symbol_hit, text.size()),
                               std::string(text)});
  }
  return out;
}

Scope scope_of(const QueryNode& q, const ShardMeta& meta) {
  if (auto f = q.as<FilterNode>()) {
    if (f->kind == FilterKind::Repo) return f->argument == meta.repo_id ? Scope::Maybe : Scope::No;
    if (f->kind == FilterKind::Revision) {
      return f->argument == meta.revision_id ? Scope::Maybe : Scope::No;
    }
    return Scope::Maybe;
  }
  if (auto a = q.as<AndNode>()) {
    for (const auto& c : a->children) if (scope_of(c, meta) == Scope::No) return Scope::No;
    return Scope::Maybe;
  }
  if (auto o = q.as<OrNode>()) {
    for (const auto& c : o->children) if (scope_of(c, meta) == Scope::Maybe) return Scope::Maybe;
    return Scope::No;
  }
  return Scope::Maybe;
}

void collect_filters(const QueryNode& q, FilterKind kind, std::vector<std::string>& out) {
  if (auto f = q.as<FilterNode>()) {
    if (f->kind == kind) out.push_back(f->argument);
    return;
  }
  if (auto a = q.as<AndNode>()) for (const auto& c : a->children) collect_filters(c, kind, out);
  if (auto o = q.as<OrNode>()) for (const auto& c : o->children) collect_filters(c, kind, out);
}

}  // namespace

Scope shard_scope(const QueryNode& tree, const ShardMeta& meta) { return scope_of(tree, meta); }

std::vector<std::string> filter_arguments(const QueryNode& tree, FilterKind kind) {
  std::vector<std::string> out;
  collect_filters(tree, kind, out);
  return out;
}

std::vector<SearchResult> search_shard(const Shard& shard, const CompiledQuery& query,
                                       std::size_t limit, Execution execution, SearchStats* stats) {
  std::vector<SearchResult> results;
  if (limit == 0 || shard_scope(query.tree, shard.meta()) == Scope::No) {
    if (stats) *stats = {};
    return results;
  }
  const Program program(query.tree);
  const auto files = candidates(shard, query.required).members();
  std::vector<std::vector<SearchResult>> per_file(files.size());
  for_each_index(files.size(), execution,
                 [&](std::size_t i) { per_file[i] = verify_file(shard, program, files[i]); });

  std::size_t matched = 0;
  for (auto& part : per_file) {
    if (!part.empty()) ++matched;
    for (auto& r : part) results.push_back(std::move(r));
  }
  if (stats) *stats = SearchStats{files.size(), matched};
  std::sort(results.begin(), results.end(), result_before);
  if (results.size() > limit) results.resize(limit);
  return results;
}

}  // namespace scs
