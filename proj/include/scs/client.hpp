#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>

#include "scs/api.hpp"
#include "scs/shard_set.hpp"

namespace httplib {
class Client;
}

namespace scs {

enum class ClientStatus { Ok, Overloaded, Timeout, Unreachable, Rejected };

std::string to_string(ClientStatus s);

struct ClientReply {
  ClientStatus status = ClientStatus::Ok;
  SearchResponse response;
  std::string message;  // server error text for Rejected
};

// One request/response exchange with a search backend. Unknown repositories
// come back as an empty Ok reply.
class SearchClient {
 public:
  virtual ~SearchClient() = default;
  virtual ClientReply search(const SearchRequest& request, std::chrono::milliseconds timeout) = 0;
};

// In-process backend; never overloaded.
class LocalSearchClient final : public SearchClient {
 public:
  explicit LocalSearchClient(std::shared_ptr<const ShardSet> shards) : shards_(std::move(shards)) {}
  ClientReply search(const SearchRequest& request, std::chrono::milliseconds timeout) override;

 private:
  std::shared_ptr<const ShardSet> shards_;
};

// POST /search against a running service. Not shared between threads
// concurrently without external care; calls are serialised internally.
class HttpSearchClient final : public SearchClient {
 public:
  explicit HttpSearchClient(const std::string& base_url);
  ~HttpSearchClient() override;
  ClientReply search(const SearchRequest& request, std::chrono::milliseconds timeout) override;

 private:
  std::mutex mu_;
  std::unique_ptr<httplib::Client> http_;
};

// GET /file against a running service.
class HttpContentSource final : public ContentSource {
 public:
  explicit HttpContentSource(const std::string& base_url);
  ~HttpContentSource() override;
  // Throws ClientUnreachable on transport failure; nullopt on 404.
  std::optional<std::string> fetch(const std::string& repo_id, const std::string& revision_id,
                                   const std::string& path) const override;

 private:
  mutable std::mutex mu_;
  std::unique_ptr<httplib::Client> http_;
};

}  // namespace scs
