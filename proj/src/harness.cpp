#include "scs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "scs/assembler.hpp"
#include "scs/error.hpp"
#include "scs/shard_io.hpp"
#include "scs/tokenizer.hpp"

namespace scs {

namespace fs = std::filesystem;

// ---- index ----------------------------------------------------------------

std::vector<SourceFile> read_tree(const fs::path& root) {
  std::vector<SourceFile> files;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_directory() && it->path().filename() == ".git") {
      it.disable_recursion_pending();
      continue;
    }
    if (!it->is_regular_file()) continue;
    std::ifstream in(it->path(), std::ios::binary);
    if (!in) throw Error("cannot read " + it->path().string());
    std::ostringstream buf;
    buf << in.rdbuf();
    auto rel = fs::relative(it->path(), root).generic_string();
    const auto lang = detect_language(rel);
    files.push_back(SourceFile{std::move(rel), std::move(buf).str(), lang});
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  return files;
}

std::string shard_file_name(const std::string& repo_id, const std::string& revision_id) {
  auto clean = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
      out.push_back(ok ? c : '_');
    }
    return out.substr(0, 60);
  };
  // FNV-1a keeps names distinct after cleaning.
  std::uint32_t h = 2166136261u;
  for (char c : repo_id + '\0' + revision_id) {
    h ^= static_cast<unsigned char>(c);
    h *= 16777619u;
  }
  return fmt::format("{}@{}-{:08x}.scs", clean(repo_id), clean(revision_id), h);
}

IndexSummary run_index(const IndexOptions& options, std::ostream& report) {
  IndexSummary summary;
  const auto records = read_dataset(options.dataset, options.fields);
  std::vector<std::pair<std::string, std::string>> snapshots;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : records) {
    if (seen.emplace(r.repo_id, r.revision_id).second) snapshots.emplace_back(r.repo_id, r.revision_id);
  }
  fs::create_directories(options.out);
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();

  for (const auto& [repo, rev] : snapshots) {
    const auto dir = options.repos / repo / rev;
    if (!fs::is_directory(dir)) {
      spdlog::warn("revision directory missing, skipped: {}", dir.string());
      summary.skipped.emplace_back(repo, rev);
      continue;
    }
    auto files = read_tree(dir);
    BuildOptions build;
    build.built_at = now;
    build.execution = options.execution;
    const auto shard = build_shard(repo, rev, std::move(files), build);
    save_shard(shard, options.out / shard_file_name(repo, rev));
    ++summary.shards_written;
    ++summary.revisions_per_repo[repo];
    summary.files_per_repo[repo] += shard.meta().file_count;
  }

  std::size_t width = 10;
  for (const auto& [repo, n] : summary.revisions_per_repo) width = std::max(width, repo.size());
  report << fmt::format("{:<{}}  {:>9}  {:>7}\n", "repo", width, "revisions", "files");
  std::size_t total_files = 0;
  for (const auto& [repo, n] : summary.revisions_per_repo) {
    report << fmt::format("{:<{}}  {:>9}  {:>7}\n", repo, width, n, summary.files_per_repo[repo]);
    total_files += summary.files_per_repo[repo];
  }
  report << fmt::format("{:<{}}  {:>9}  {:>7}\n", "total", width, summary.shards_written, total_files);
  report << fmt::format("{} repositories, {} shards written, {} skipped\n",
                        summary.revisions_per_repo.size(), summary.shards_written, summary.skipped.size());
  for (const auto& [repo, rev] : summary.skipped) report << "skipped: " << repo << "@" << rev << "\n";
  summary.exit_code = summary.skipped.empty() ? kExitOk : kExitPartial;
  return summary;
}

// ---- backends ---------------------------------------------------------------

namespace {

class SharedContent final : public ContentSource {
 public:
  explicit SharedContent(std::shared_ptr<const ShardSet> shards) : shards_(std::move(shards)) {}
  std::optional<std::string> fetch(const std::string& repo, const std::string& rev,
                                   const std::string& path) const override {
    return shards_->fetch(repo, rev, path);
  }

 private:
  std::shared_ptr<const ShardSet> shards_;
};

}  // namespace

BackendFactory http_backend(std::string base_url) {
  return [url = std::move(base_url)] {
    return Backend{std::make_unique<HttpSearchClient>(url), std::make_unique<HttpContentSource>(url)};
  };
}

BackendFactory local_backend(std::shared_ptr<const ShardSet> shards) {
  return [shards = std::move(shards)] {
    return Backend{std::make_unique<LocalSearchClient>(shards), std::make_unique<SharedContent>(shards)};
  };
}

RevisionOrder RevisionOrder::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open revision order file " + file.string());
  return parse(in);
}

RevisionOrder RevisionOrder::parse(std::istream& in) {
  RevisionOrder order;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string repo, rev;
    if (!(ss >> repo >> rev)) continue;
    auto& ranks = order.rank_[repo];
    ranks.try_emplace(rev, ranks.size());
  }
  return order;
}

bool RevisionOrder::allows(const std::string& repo, const std::string& query,
                           const std::string& candidate) const {
  const auto r = rank_.find(repo);
  if (r == rank_.end()) return true;
  const auto q = r->second.find(query);
  if (q == r->second.end()) return true;
  const auto c = r->second.find(candidate);
  return c != r->second.end() && c->second <= q->second;
}

// ---- retrieve ---------------------------------------------------------------

std::string render_point(const PointReport& p) {
  nlohmann::ordered_json j;
  j["id"] = p.id;
  j["hit"] = p.hit;
  j["winning_variant"] = p.winning_variant ? nlohmann::ordered_json(std::string(variant_name(*p.winning_variant)))
                                           : nlohmann::ordered_json(nullptr);
  j["context"] = p.context;
  j["total_tokens"] = p.total_tokens;
  if (!p.error.empty()) j["error"] = p.error;
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

PointReport process_point(const CompletionPoint& cp, const RetrieveOptions& options, Backend& backend,
                          const Tokenizer& tokenizer, bool assemble_context) {
  const auto started = std::chrono::steady_clock::now();
  PointReport report;
  report.id = cp.id;
  try {
    const auto original = backend.content->fetch(cp.repo_id, cp.revision_id, cp.path).value_or("");
    const auto modified = reconstruct_modified(cp);
    const auto diff = compute_diff(original, modified.text, modified.completion_line);
    const auto lang = detect_language(cp.path);
    const auto variants = generate_variants(mine_terms(diff, lang));
    ResultFilter keep;
    if (options.revision_order) {
      keep = [&](const SearchResult& r) {
        return options.revision_order->allows(cp.repo_id, cp.revision_id, r.revision_id);
      };
    }
    auto outcome = execute_ladder(*backend.search, cp, options.mode, variants, options.ladder, keep);
    report.hit = outcome.hit;
    report.winning_variant = outcome.winning_variant;
    if (outcome.hit && assemble_context) {
      const auto budget = compute_budget(options.model_max, options.reserved_buffer, cp.prefix, cp.suffix,
                                         tokenizer, options.per_file_budget, options.top_k);
      auto bundle = assemble(cp.id, outcome.results, *backend.content, budget, tokenizer, lang);
      report.context = std::move(bundle.rendered);
      report.total_tokens = bundle.total_tokens;
    }
  } catch (const ClientUnreachable&) {
    throw;
  } catch (const std::exception& e) {
    spdlog::error("point {}: {}", cp.id, e.what());
    report.error = e.what();
    report.context.clear();
    report.total_tokens = 0;
  }
  report.duration = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - started);
  return report;
}

namespace {

// Runs work(i) for i in [begin, end) on up to `in_flight` workers and hands
// the reports to `sink` in index order. Returns false when a worker hit
// ClientUnreachable; nothing at or after that index reaches the sink.
template <typename Work, typename Sink>
bool run_ordered(std::size_t begin, std::size_t end, std::size_t in_flight, const BackendFactory& factory,
                 Work work, Sink sink) {
  std::mutex mu;
  std::condition_variable cv;
  std::map<std::size_t, PointReport> done;
  std::size_t next = begin;
  std::size_t finished = 0;
  bool abort = false;

  const auto workers = std::max<std::size_t>(1, std::min(in_flight, end - std::min(begin, end)));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        auto backend = factory();
        while (true) {
          std::size_t i;
          {
            std::lock_guard lock(mu);
            if (abort || next >= end) break;
            i = next++;
          }
          try {
            auto report = work(i, backend);
            std::lock_guard lock(mu);
            done.emplace(i, std::move(report));
          } catch (const ClientUnreachable& e) {
            spdlog::error("{}", e.what());
            std::lock_guard lock(mu);
            abort = true;
          }
          cv.notify_all();
        }
      } catch (const std::exception& e) {
        spdlog::error("worker failed: {}", e.what());
        std::lock_guard lock(mu);
        abort = true;
      }
      std::lock_guard lock(mu);
      ++finished;
      cv.notify_all();
    });
  }

  std::size_t emit = begin;
  while (emit < end) {
    PointReport report;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return done.count(emit) > 0 || finished == workers; });
      auto it = done.find(emit);
      if (it == done.end()) break;
      report = std::move(it->second);
      done.erase(it);
    }
    sink(emit, report);
    ++emit;
  }
  for (auto& t : pool) t.join();
  return emit >= end;
}

void write_checkpoint(const fs::path& file, std::size_t completed, const std::string& last_id) {
  const auto tmp = fs::path(file.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << nlohmann::json{{"completed", completed}, {"last_id", last_id}}.dump() << "\n";
  }
  fs::rename(tmp, file);
}

// Number of points already written by a previous run; trims any partial
// tail of the output so it holds exactly that many lines.
std::size_t resume_point(const RetrieveOptions& options, const std::vector<CompletionPoint>& records,
                         const fs::path& ckpt) {
  if (!fs::exists(ckpt)) return 0;
  std::ifstream in(ckpt);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw Error("unreadable checkpoint " + ckpt.string() + ": " + e.what());
  }
  const auto completed = j.value("completed", std::size_t{0});
  const auto last_id = j.value("last_id", std::string());
  if (completed > records.size() || (completed > 0 && records[completed - 1].id != last_id)) {
    throw Error("checkpoint " + ckpt.string() + " does not match the dataset");
  }
  std::vector<std::string> lines;
  {
    std::ifstream prev(options.out, std::ios::binary);
    std::string line;
    while (lines.size() < completed && std::getline(prev, line)) lines.push_back(line);
  }
  if (lines.size() < completed) throw Error("output file is shorter than its checkpoint");
  std::ofstream out(options.out, std::ios::binary | std::ios::trunc);
  for (const auto& l : lines) out << l << '\n';
  return completed;
}

}  // namespace

RetrieveSummary run_retrieve(const RetrieveOptions& options, const BackendFactory& backend) {
  const auto started = std::chrono::steady_clock::now();
  RetrieveSummary summary;
  const auto records = read_dataset(options.dataset, options.fields);
  summary.records = records.size();
  const fs::path ckpt = options.out.string() + ".ckpt";
  if (options.out.has_parent_path()) fs::create_directories(options.out.parent_path());

  std::size_t begin = 0;
  if (options.resume) {
    begin = resume_point(options, records, ckpt);
    if (begin > 0) spdlog::info("resuming after {} completed points", begin);
  } else {
    std::ofstream(options.out, std::ios::binary | std::ios::trunc);
    fs::remove(ckpt);
  }
  if (begin == 0 && !fs::exists(options.out)) std::ofstream(options.out, std::ios::binary);

  const auto tokenizer = make_tokenizer(options.tokenizer_command);
  std::ofstream out(options.out, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot open output " + options.out.string());
  summary.written = begin;

  const bool complete = run_ordered(
      begin, records.size(), options.in_flight, backend,
      [&](std::size_t i, Backend& b) { return process_point(records[i], options, b, *tokenizer, true); },
      [&](std::size_t i, const PointReport& p) {
        out << render_point(p) << '\n';
        out.flush();
        ++summary.written;
        if (p.hit) ++summary.hits;
        if (!p.error.empty()) ++summary.errors;
        write_checkpoint(ckpt, i + 1, records[i].id);
      });

  summary.unreachable = !complete;
  summary.wall = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  summary.exit_code = summary.unreachable ? kExitUnreachable : summary.errors > 0 ? kExitPartial : kExitOk;
  return summary;
}

// ---- hitrate ----------------------------------------------------------------

HitRateReport run_hitrate(const RetrieveOptions& options, const BackendFactory& backend, std::ostream& report) {
  HitRateReport result;
  const auto records = read_dataset(options.dataset, options.fields);
  const auto tokenizer = make_tokenizer(options.tokenizer_command);
  result.points.resize(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) result.points[i].id = records[i].id;

  for (const auto mode : {ScopeMode::SingleShard, ScopeMode::CrossShard}) {
    auto opts = options;
    opts.mode = mode;
    auto& counts = mode == ScopeMode::SingleShard ? result.single : result.cross;
    const auto started = std::chrono::steady_clock::now();
    const bool complete = run_ordered(
        0, records.size(), opts.in_flight, backend,
        [&](std::size_t i, Backend& b) { return process_point(records[i], opts, b, *tokenizer, false); },
        [&](std::size_t i, const PointReport& p) {
          auto& point = result.points[i];
          if (mode == ScopeMode::SingleShard) {
            point.single_hit = p.hit;
            point.single_time = p.duration;
          } else {
            point.cross_hit = p.hit;
            point.cross_time = p.duration;
          }
          if (!p.error.empty()) result.exit_code = std::max(result.exit_code, kExitPartial);
          if (p.hit) {
            ++counts.hit;
            ++counts.wins[std::string(variant_name(*p.winning_variant))];
          } else {
            ++counts.miss;
          }
        });
    counts.wall = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    if (!complete) {
      report << "search service unreachable during " << to_string(mode) << "-shard run\n";
      result.exit_code = kExitUnreachable;
      return result;
    }
  }

  const auto n = records.size();
  auto rate = [n](std::size_t hit) { return n == 0 ? 0.0 : 100.0 * static_cast<double>(hit) / static_cast<double>(n); };
  report << fmt::format("{:<13}  {:>6}  {:>6}  {:>6}  {:>8}  {:>9}\n", "setting", "hit", "miss", "total",
                        "hit_rate", "wall_s");
  for (const auto& [name, m] : {std::pair<const char*, const ModeReport&>{"single-shard", result.single},
                                std::pair<const char*, const ModeReport&>{"cross-shard", result.cross}}) {
    report << fmt::format("{:<13}  {:>6}  {:>6}  {:>6}  {:>7.1f}%  {:>9.2f}\n", name, m.hit, m.miss, n,
                          rate(m.hit), static_cast<double>(m.wall.count()) / 1000.0);
  }
  report << "\n" << fmt::format("{:<26}  {:>6}  {:>6}\n", "winning variant", "single", "cross");
  for (const auto id : canonical_order()) {
    const std::string name(variant_name(id));
    const auto s = result.single.wins.count(name) ? result.single.wins.at(name) : 0;
    const auto c = result.cross.wins.count(name) ? result.cross.wins.at(name) : 0;
    if (s + c > 0) report << fmt::format("{:<26}  {:>6}  {:>6}\n", name, s, c);
  }
  result.cross_dominates = result.cross.hit >= result.single.hit;
  report << "\ncross >= single: " << (result.cross_dominates ? "yes" : "NO") << "\n";
  if (!result.cross_dominates) result.exit_code = std::max(result.exit_code, kExitPartial);
  return result;
}

}  // namespace scs
