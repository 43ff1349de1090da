#include "fixtures.hpp"

#include <fstream>
#include <json.hpp>
#include <regex>
#include <set>
#include <sstream>

#include "scs/language.hpp"

namespace fs = std::filesystem;

namespace scs::testing {

TempDir::TempDir() {
  std::random_device rd;
  path_ = fs::temp_directory_path() / ("scs-test-" + std::to_string(rd()) + std::to_string(rd()));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& file, const std::string& content) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << content;
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

void write_dataset(const fs::path& file, const std::vector<CompletionPoint>& points) {
  std::string text;
  for (const auto& p : points) {
    nlohmann::json j{{"id", p.id},         {"repo", p.repo_id},     {"revision", p.revision_id},
                     {"path", p.path},     {"prefix", p.prefix},    {"suffix", p.suffix}};
    text += j.dump() + "\n";
  }
  write_file(file, text);
}

void write_repos(const fs::path& root, const RepoTree& repos) {
  for (const auto& [key, files] : repos) {
    fs::create_directories(root / key.first / key.second);
    for (const auto& f : files) write_file(root / key.first / key.second / f.path, f.content);
  }
}

ShardSet shard_set_of(const RepoTree& repos) {
  std::vector<Shard> shards;
  for (const auto& [key, files] : repos) shards.push_back(build_shard(key.first, key.second, files));
  return ShardSet(std::move(shards));
}

namespace {

std::string feature_file(int n) {
  const auto s = std::to_string(n);
  return "package demo\n\nclass Feature" + s + " {\n    fun compute" + s + "(value: Int): Int {\n        val scaled" +
         s + " = value * " + s + "\n        return scaled" + s + "\n    }\n}\n";
}

std::string legacy_file(int n) {
  const auto s = std::to_string(n);
  return "object Zorblax" + s + " {\n    val quuxWidget" + s + " = flimflam" + s + "()\n    fun flimflam" + s +
         "() = 0\n}\n";
}

// Splits `content` around line `gap` (1-based), dropping that line.
CompletionPoint cut(std::string id, std::string repo, std::string rev, std::string path, const std::string& content,
                    std::size_t gap) {
  std::vector<std::string> lines;
  std::istringstream in(content);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  CompletionPoint p{std::move(id), std::move(repo), std::move(rev), std::move(path), "", ""};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i + 1 < gap) p.prefix += lines[i] + "\n";
    if (i + 1 > gap) p.suffix += lines[i] + "\n";
  }
  return p;
}

}  // namespace

HarnessFixture hitrate_fixture() {
  HarnessFixture f;
  auto& r1 = f.repos[{"proj", "r1"}];
  auto& r2 = f.repos[{"proj", "r2"}];
  for (int n = 0; n < 8; ++n) {
    const auto path = "src/Feature" + std::to_string(n) + ".kt";
    r1.push_back({path, feature_file(n), Language::Kotlin});
    r2.push_back({path, feature_file(n), Language::Kotlin});
  }
  r2.push_back({"README.md", "demo project\n", Language::Other});
  for (int n = 0; n < 2; ++n) r1.push_back({"src/Legacy" + std::to_string(n) + ".kt", legacy_file(n), Language::Kotlin});

  for (int n = 0; n < 8; ++n) {
    f.points.push_back(cut("p" + std::to_string(n), "proj", "r2", "src/Feature" + std::to_string(n) + ".kt",
                           feature_file(n), 5));
  }
  for (int n = 0; n < 2; ++n) {
    f.points.push_back(cut("p" + std::to_string(8 + n), "proj", "r2", "src/Legacy" + std::to_string(n) + ".kt",
                           legacy_file(n), 3));
  }
  return f;
}

HarnessFixture random_harness_fixture(Rng& rng, std::size_t points) {
  HarnessFixture f;
  const int revisions = std::uniform_int_distribution<int>(2, 4)(rng);
  for (int r = 0; r < revisions; ++r) {
    auto files = random_corpus(rng, {8, 40});
    // A revision-specific word so some points only match elsewhere.
    files.push_back({"only_" + std::to_string(r) + ".txt", "marker" + std::to_string(r) + "word\n", Language::Other});
    f.repos[{"repo", "v" + std::to_string(r)}] = std::move(files);
  }
  for (std::size_t i = 0; i < points; ++i) {
    const auto rev = "v" + std::to_string(std::uniform_int_distribution<int>(0, revisions - 1)(rng));
    const auto& files = f.repos[{"repo", rev}];
    const auto& file = files[std::uniform_int_distribution<std::size_t>(0, files.size() - 1)(rng)];
    const auto lines = static_cast<std::size_t>(std::count(file.content.begin(), file.content.end(), '\n')) + 1;
    auto p = cut("q" + std::to_string(i), "repo", rev, file.path, file.content,
                 std::uniform_int_distribution<std::size_t>(1, lines)(rng));
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
      case 0: {  // a brand-new file mentioning another revision's marker
        p.path = "new_" + std::to_string(i) + ".kt";
        p.prefix = "val markerRef = marker" + std::to_string(std::uniform_int_distribution<int>(0, revisions - 1)(rng)) +
                   "word\n";
        p.suffix = "";
        break;
      }
      case 1:  // a new file with nothing findable
        p.path = "empty_" + std::to_string(i) + ".kt";
        p.prefix = "val qqzz = 1\n";
        p.suffix = "";
        break;
      default:
        break;
    }
    f.points.push_back(std::move(p));
  }
  return f;
}

bool grep_hit(const HarnessFixture& f, const CompletionPoint& cp, bool cross) {
  std::string text = cp.prefix + cp.suffix;
  const auto own = f.repos.find({cp.repo_id, cp.revision_id});
  if (own != f.repos.end()) {
    for (const auto& file : own->second) {
      if (file.path == cp.path) text += file.content;
    }
  }
  const auto lang = detect_language(cp.path);
  static const std::regex ident("[A-Za-z_][A-Za-z0-9_]*");
  std::set<std::string> words;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), ident); it != std::sregex_iterator(); ++it) {
    if (!is_keyword(lang, it->str())) words.insert(it->str());
  }
  for (const auto& [key, files] : f.repos) {
    if (key.first != cp.repo_id || (!cross && key.second != cp.revision_id)) continue;
    for (const auto& file : files) {
      for (const auto& w : words) {
        if (file.content.find(w) != std::string::npos) return true;
      }
    }
  }
  return false;
}

}  // namespace scs::testing
