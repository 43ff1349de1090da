#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "generators.hpp"
#include "scs/miner.hpp"
#include "scs/shard_set.hpp"

namespace scs::testing {

// Directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& file, const std::string& content);
std::string read_file(const std::filesystem::path& file);
std::vector<std::string> read_lines(const std::filesystem::path& file);

void write_dataset(const std::filesystem::path& file, const std::vector<CompletionPoint>& points);

// Repositories as (repo, revision) -> files, materialised under
// <root>/<repo>/<revision>/.
using RepoTree = std::map<std::pair<std::string, std::string>, std::vector<SourceFile>>;
void write_repos(const std::filesystem::path& root, const RepoTree& repos);
ShardSet shard_set_of(const RepoTree& repos);

struct HarnessFixture {
  RepoTree repos;
  std::vector<CompletionPoint> points;
};

// Ten Kotlin points in repo "proj" at revision r2. Eight edit files that
// exist in r2; the last two sit in files deleted in r2 whose identifiers
// only exist in r1.
HarnessFixture hitrate_fixture();

// One repository with a few random revisions and points cut from their
// files, some with words taken from sibling revisions.
HarnessFixture random_harness_fixture(Rng& rng, std::size_t points);

// Brute-force hit check: does any identifier of the point (prefix, suffix
// and the original file at its revision), keywords aside, occur verbatim
// in a file of the searched revisions?
bool grep_hit(const HarnessFixture& f, const CompletionPoint& cp, bool cross);

}  // namespace scs::testing
