#include "scs/service.hpp"

#include <algorithm>
#include <cstdlib>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "scs/api_json.hpp"
#include "scs/error.hpp"

namespace scs {

using nlohmann::json;

AdmissionGate::AdmissionGate(std::size_t limit, std::size_t queue)
    : limit_(std::max<std::size_t>(1, limit)), queue_(queue) {}

bool AdmissionGate::enter() {
  std::unique_lock lock(mu_);
  if (active_ < limit_) {
    ++active_;
    return true;
  }
  if (waiting_ >= queue_) return false;
  ++waiting_;
  cv_.wait(lock, [&] { return active_ < limit_; });
  --waiting_;
  ++active_;
  return true;
}

void AdmissionGate::leave() {
  {
    std::lock_guard lock(mu_);
    --active_;
  }
  cv_.notify_one();
}

std::size_t default_max_concurrency() {
  if (const char* env = std::getenv("SCS_MAX_CONCURRENCY")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    spdlog::warn("ignoring SCS_MAX_CONCURRENCY={}", env);
  }
  return 2 * std::max(1u, std::thread::hardware_concurrency());
}

namespace {

ServiceConfig resolve(ServiceConfig c) {
  if (c.max_concurrency == 0) c.max_concurrency = default_max_concurrency();
  if (c.queue_limit == 0) c.queue_limit = std::max<std::size_t>(16, 4 * c.max_concurrency);
  return c;
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(dump_json(body), "application/json");
}

}  // namespace

SearchService::SearchService(std::shared_ptr<const ShardSet> shards, ServiceConfig config)
    : shards_(std::move(shards)),
      config_(resolve(std::move(config))),
      gate_(config_.max_concurrency, config_.queue_limit),
      server_(std::make_unique<httplib::Server>()) {
  // Enough handler threads that the gate, not the pool, decides overload.
  const auto threads = config_.max_concurrency + config_.queue_limit + 8;
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  server_->set_keep_alive_timeout(2);
  server_->set_tcp_nodelay(true);
  // SO_REUSEADDR only: the library default adds SO_REUSEPORT, which lets a
  // second server share a port that is already in use.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  routes();
}

SearchService::~SearchService() { stop(); }

void SearchService::routes() {
  server_->Post("/search", [this](const httplib::Request& req, httplib::Response& res) {
    SearchRequest request;
    try {
      json::parse(req.body).get_to(request);
    } catch (const std::exception& e) {
      reply(res, 400, {{"error", "bad_request"}, {"message", e.what()}});
      return;
    }
    if (!gate_.enter()) {
      json body = SearchResponse{};
      body["overloaded"] = true;
      reply(res, 503, body);
      return;
    }
    struct Leave {
      AdmissionGate& g;
      ~Leave() { g.leave(); }
    } leave{gate_};
    try {
      if (config_.search_hook) config_.search_hook(request);
      reply(res, 200, shards_->search(request, config_.execution));
    } catch (const ParseError& e) {
      reply(res, 400, {{"error", "parse_error"}, {"position", e.position()}, {"message", e.detail()}});
    } catch (const UnknownRepo& e) {
      reply(res, 404, {{"error", "unknown_repo"}, {"repo", e.repo()}});
    } catch (const std::exception& e) {
      spdlog::error("search failed: {}", e.what());
      reply(res, 500, {{"error", "internal"}, {"message", e.what()}});
    }
  });

  server_->Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, {{"status", "ok"}, {"shards", shards_->size()}});
  });

  server_->Get("/shards", [this](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& s : shards_->shards()) list.push_back(shard_info(s->meta()));
    reply(res, 200, list);
  });

  server_->Get("/file", [this](const httplib::Request& req, httplib::Response& res) {
    auto content = shards_->fetch(req.get_param_value("repo"), req.get_param_value("rev"),
                                  req.get_param_value("path"));
    if (!content) {
      reply(res, 404, {{"error", "missing_file"}});
      return;
    }
    res.set_content(std::move(*content), "text/plain");
  });
}

int SearchService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound <= 0) throw Error("cannot bind " + host);
    bound_ = true;
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  bound_ = true;
  return port;
}

void SearchService::run() {
  ran_ = true;
  server_->listen_after_bind();
}

void SearchService::start() {
  thread_ = std::thread([this] { run(); });
  server_->wait_until_ready();
}

void SearchService::stop() {
  if (!server_) return;
  // The listening socket is only released by a running server.
  if (bound_ && !ran_) start();
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace scs
