#include "scs/client.hpp"

#include <httplib.h>

#include "scs/api_json.hpp"
#include "scs/error.hpp"

namespace scs {

using nlohmann::json;

std::string to_string(ClientStatus s) {
  switch (s) {
    case ClientStatus::Ok: return "ok";
    case ClientStatus::Overloaded: return "overloaded";
    case ClientStatus::Timeout: return "timeout";
    case ClientStatus::Unreachable: return "unreachable";
    case ClientStatus::Rejected: return "rejected";
  }
  return "unknown";
}

ClientReply LocalSearchClient::search(const SearchRequest& request, std::chrono::milliseconds) {
  ClientReply reply;
  try {
    reply.response = shards_->search(request);
  } catch (const ParseError& e) {
    reply.status = ClientStatus::Rejected;
    reply.message = e.what();
  } catch (const UnknownRepo&) {
  }
  return reply;
}

HttpSearchClient::HttpSearchClient(const std::string& base_url)
    : http_(std::make_unique<httplib::Client>(base_url)) {
  http_->set_keep_alive(true);
  http_->set_tcp_nodelay(true);
}

HttpSearchClient::~HttpSearchClient() = default;

ClientReply HttpSearchClient::search(const SearchRequest& request, std::chrono::milliseconds timeout) {
  std::lock_guard lock(mu_);
  http_->set_connection_timeout(timeout);
  http_->set_read_timeout(timeout);
  http_->set_write_timeout(timeout);

  ClientReply reply;
  auto res = http_->Post("/search", dump_json(json(request)), "application/json");
  if (!res) {
    switch (res.error()) {
      case httplib::Error::Read:
      case httplib::Error::Write:
      case httplib::Error::ConnectionTimeout:
        reply.status = ClientStatus::Timeout;
        break;
      default:
        reply.status = ClientStatus::Unreachable;
        break;
    }
    reply.message = httplib::to_string(res.error());
    return reply;
  }
  switch (res->status) {
    case 200:
      try {
        json::parse(res->body).get_to(reply.response);
      } catch (const std::exception& e) {
        reply.status = ClientStatus::Rejected;
        reply.message = std::string("malformed response: ") + e.what();
      }
      return reply;
    case 404:
      return reply;
    case 400:
      reply.status = ClientStatus::Rejected;
      reply.message = res->body;
      return reply;
    default:
      // 503 is the overload signal; other 5xx are treated the same way.
      reply.status = res->status >= 500 ? ClientStatus::Overloaded : ClientStatus::Rejected;
      reply.message = res->body;
      return reply;
  }
}

HttpContentSource::HttpContentSource(const std::string& base_url)
    : http_(std::make_unique<httplib::Client>(base_url)) {
  http_->set_keep_alive(true);
  http_->set_tcp_nodelay(true);
}

HttpContentSource::~HttpContentSource() = default;

std::optional<std::string> HttpContentSource::fetch(const std::string& repo_id,
                                                    const std::string& revision_id,
                                                    const std::string& path) const {
  std::lock_guard lock(mu_);
  const httplib::Params params{{"repo", repo_id}, {"rev", revision_id}, {"path", path}};
  auto res = http_->Get("/file", params, httplib::Headers{});
  if (!res) throw ClientUnreachable("GET /file failed: " + httplib::to_string(res.error()));
  if (res->status == 404) return std::nullopt;
  if (res->status != 200) throw ClientUnreachable("GET /file returned " + std::to_string(res->status));
  return std::move(res->body);
}

}  // namespace scs
