#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "scs/api.hpp"
#include "scs/parallel.hpp"
#include "scs/shard_set.hpp"

namespace httplib {
class Server;
}

namespace scs {

// Bounds concurrent searches: up to `limit` run, up to `queue` wait, the
// rest are refused.
class AdmissionGate {
 public:
  AdmissionGate(std::size_t limit, std::size_t queue);

  // Blocks while all run slots are taken and the queue has room. False when
  // the queue is full as well.
  bool enter();
  void leave();

  std::size_t limit() const { return limit_; }
  std::size_t queue() const { return queue_; }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t limit_;
  std::size_t queue_;
  std::size_t active_ = 0;
  std::size_t waiting_ = 0;
};

// 2 x hardware threads unless SCS_MAX_CONCURRENCY holds a positive integer.
std::size_t default_max_concurrency();

struct ServiceConfig {
  std::size_t max_concurrency = 0;  // 0 -> default_max_concurrency()
  std::size_t queue_limit = 0;      // 0 -> max(16, 4 * max_concurrency)
  Execution execution = Execution::Serial;
  // Runs inside the admitted section before each search; tests use it to
  // hold requests open.
  std::function<void(const SearchRequest&)> search_hook;
};

// HTTP front end over an immutable ShardSet.
//
//   POST /search   SearchRequest JSON -> SearchResponse JSON
//                  400 {"error":"parse_error","position","message"}
//                  400 {"error":"bad_request","message"}
//                  404 {"error":"unknown_repo","repo"}
//                  503 {"overloaded":true,...}
//   GET  /health   {"status":"ok","shards":n}
//   GET  /shards   [{"repo_id","revision_id","file_count"}]
//   GET  /file?repo=&rev=&path=   raw file content or 404
class SearchService {
 public:
  SearchService(std::shared_ptr<const ShardSet> shards, ServiceConfig config = {});
  ~SearchService();
  SearchService(const SearchService&) = delete;
  SearchService& operator=(const SearchService&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws Error when the
  // address cannot be bound.
  int bind(const std::string& host, int port);
  void run();    // blocks until stop()
  void start();  // run() on a background thread
  void stop();

  const AdmissionGate& gate() const { return gate_; }

 private:
  void routes();

  std::shared_ptr<const ShardSet> shards_;
  ServiceConfig config_;
  AdmissionGate gate_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  bool bound_ = false;
  std::atomic<bool> ran_{false};
};

}  // namespace scs
