#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "scs/api.hpp"
#include "scs/client.hpp"
#include "scs/dataset.hpp"
#include "scs/ladder.hpp"
#include "scs/parallel.hpp"
#include "scs/shard_set.hpp"
#include "scs/tokenizer.hpp"

namespace scs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUnreachable = 2;

// ---- index ----------------------------------------------------------------

struct IndexOptions {
  std::filesystem::path dataset;
  std::filesystem::path repos;  // <repos>/<repo>/<revision>/...
  std::filesystem::path out;
  FieldMap fields;
  Execution execution = Execution::Parallel;
};

struct IndexSummary {
  std::size_t shards_written = 0;
  std::vector<std::pair<std::string, std::string>> skipped;  // (repo, revision)
  std::map<std::string, std::size_t> revisions_per_repo;
  std::map<std::string, std::size_t> files_per_repo;
  int exit_code = kExitOk;
};

// Reads every file below `root` with paths relative to it ('/'-separated);
// .git directories are ignored.
std::vector<SourceFile> read_tree(const std::filesystem::path& root);

// File name of the shard for (repo, revision) inside an output directory.
std::string shard_file_name(const std::string& repo_id, const std::string& revision_id);

// One shard per distinct (repo, revision) of the dataset. Prints a summary
// table of revisions per repository to `report`.
IndexSummary run_index(const IndexOptions& options, std::ostream& report);

// ---- retrieve / hitrate -----------------------------------------------------

// Per-worker connection to a search backend.
struct Backend {
  std::unique_ptr<SearchClient> search;
  std::unique_ptr<ContentSource> content;
};
using BackendFactory = std::function<Backend()>;

BackendFactory http_backend(std::string base_url);
BackendFactory local_backend(std::shared_ptr<const ShardSet> shards);

// Revision order per repository for the temporal-leakage guard. File format:
// one "<repo> <revision>" per line, oldest first within each repository.
class RevisionOrder {
 public:
  static RevisionOrder load(const std::filesystem::path& file);
  static RevisionOrder parse(std::istream& in);
  // True when `candidate` is not later than `query` in `repo`. Revisions
  // missing from the file are rejected, unless `query` itself is missing, in
  // which case nothing is filtered.
  bool allows(const std::string& repo, const std::string& query, const std::string& candidate) const;

 private:
  std::map<std::string, std::map<std::string, std::size_t>> rank_;
};

struct RetrieveOptions {
  std::filesystem::path dataset;
  std::filesystem::path out;
  FieldMap fields;
  ScopeMode mode = ScopeMode::SingleShard;
  bool resume = false;
  LadderConfig ladder;
  long model_max = 8192;
  long reserved_buffer = 256;
  std::optional<long> per_file_budget;
  std::size_t top_k = 5;
  std::string tokenizer_command;
  std::size_t in_flight = 4;
  std::optional<RevisionOrder> revision_order;
};

struct PointReport {
  std::string id;
  bool hit = false;
  std::optional<VariantId> winning_variant;
  std::string context;
  std::size_t total_tokens = 0;
  std::string error;  // per-point failure other than unreachability
  std::chrono::microseconds duration{0};
};

struct RetrieveSummary {
  std::size_t records = 0;
  std::size_t written = 0;  // lines in the output after this run
  std::size_t hits = 0;
  std::size_t errors = 0;
  bool unreachable = false;
  std::chrono::milliseconds wall{0};
  int exit_code = kExitOk;
};

// The output line written for one point: {id, hit, winning_variant, context,
// total_tokens} plus "error" when the point failed.
std::string render_point(const PointReport& p);

// Mines, searches and assembles context for every record, at most
// `in_flight` at a time, appending lines in dataset order. A checkpoint at
// <out>.ckpt records progress; with resume, completed points are skipped.
// An unreachable server stops the run with exit code 2.
RetrieveSummary run_retrieve(const RetrieveOptions& options, const BackendFactory& backend);

// Runs one point through diff, mining and the ladder; assembles context
// when `assemble_context` is set. Throws ClientUnreachable.
PointReport process_point(const CompletionPoint& cp, const RetrieveOptions& options, Backend& backend,
                          const Tokenizer& tokenizer, bool assemble_context);

struct ModeReport {
  std::size_t hit = 0;
  std::size_t miss = 0;
  std::map<std::string, std::size_t> wins;  // by variant name
  std::chrono::milliseconds wall{0};
};

struct HitRateReport {
  ModeReport single;
  ModeReport cross;
  struct Point {
    std::string id;
    bool single_hit = false;
    bool cross_hit = false;
    std::chrono::microseconds single_time{0};
    std::chrono::microseconds cross_time{0};
  };
  std::vector<Point> points;
  bool cross_dominates = true;  // cross hits >= single hits
  int exit_code = kExitOk;
};

// Both modes over the dataset; prints the hit/miss table, the per-variant
// win histogram and wall times to `report`.
HitRateReport run_hitrate(const RetrieveOptions& options, const BackendFactory& backend, std::ostream& report);

}  // namespace scs
