#include "scs/api_json.hpp"

#include <stdexcept>

namespace scs {

using nlohmann::json;

void to_json(json& j, const SearchResult& r) {
  j = json{{"repo_id", r.repo_id},       {"revision_id", r.revision_id}, {"path", r.path},
           {"line_start", r.line_start}, {"line_end", r.line_end},       {"score", r.score},
           {"fragment", r.fragment}};
}

void from_json(const json& j, SearchResult& r) {
  j.at("repo_id").get_to(r.repo_id);
  j.at("revision_id").get_to(r.revision_id);
  j.at("path").get_to(r.path);
  j.at("line_start").get_to(r.line_start);
  j.at("line_end").get_to(r.line_end);
  j.at("score").get_to(r.score);
  r.fragment = j.value("fragment", std::string());
}

void to_json(json& j, const ResponseStats& s) {
  j = json{{"files_considered", s.files_considered},
           {"files_matched", s.files_matched},
           {"duration_ms", s.duration_ms},
           {"shards_searched", s.shards_searched}};
}

void from_json(const json& j, ResponseStats& s) {
  s.files_considered = j.value("files_considered", std::size_t{0});
  s.files_matched = j.value("files_matched", std::size_t{0});
  s.duration_ms = j.value("duration_ms", 0.0);
  s.shards_searched = j.value("shards_searched", std::size_t{0});
}

void to_json(json& j, const SearchResponse& r) {
  j = json{{"results", r.results}, {"stats", r.stats}, {"overloaded", r.overloaded}};
}

void from_json(const json& j, SearchResponse& r) {
  r.results = j.value("results", std::vector<SearchResult>{});
  r.stats = j.value("stats", ResponseStats{});
  r.overloaded = j.value("overloaded", false);
}

void to_json(json& j, const SearchRequest& r) {
  j = json{{"query", r.query}, {"max_results", r.max_results}};
  if (r.timeout_hint) j["timeout_ms"] = r.timeout_hint->count();
}

void from_json(const json& j, SearchRequest& r) {
  if (!j.is_object()) throw std::invalid_argument("request body must be a JSON object");
  const auto q = j.find("query");
  if (q == j.end() || !q->is_string() || q->get<std::string>().empty()) {
    throw std::invalid_argument("query must be a non-empty string");
  }
  r.query = q->get<std::string>();
  r.max_results = 50;
  if (const auto m = j.find("max_results"); m != j.end()) {
    if (!m->is_number_integer() || m->get<long long>() <= 0) {
      throw std::invalid_argument("max_results must be a positive integer");
    }
    r.max_results = m->get<std::size_t>();
  }
  r.timeout_hint.reset();
  if (const auto t = j.find("timeout_ms"); t != j.end() && !t->is_null()) {
    if (!t->is_number_integer() || t->get<long long>() < 0) {
      throw std::invalid_argument("timeout_ms must be a non-negative integer");
    }
    r.timeout_hint = std::chrono::milliseconds(t->get<long long>());
  }
}

json shard_info(const ShardMeta& meta) {
  return json{{"repo_id", meta.repo_id},
              {"revision_id", meta.revision_id},
              {"file_count", meta.file_count}};
}

std::string dump_json(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

}  // namespace scs
