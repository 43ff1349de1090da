#pragma once

#include <chrono>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace scs::acceptance {

// What the mock answers to one POST /search.
enum class Action { Empty, Hit, Overload, Slow };

// Search endpoint replaying a script of actions, one per request, and
// logging each request body. Requests beyond the script get Empty.
class MockSearchServer {
 public:
  MockSearchServer();
  ~MockSearchServer();

  std::string url() const;
  void load(std::vector<Action> script);

  struct Logged {
    std::string query;
    long timeout_ms = -1;
  };
  std::vector<Logged> take_log();

  // Slow replies sleep this long before answering.
  std::chrono::milliseconds slow_delay{350};

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::deque<Action> script_;
  std::vector<Logged> log_;
};

}  // namespace scs::acceptance
