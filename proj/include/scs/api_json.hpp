#pragma once

#include <json.hpp>
#include <string>

#include "scs/api.hpp"
#include "scs/shard.hpp"

// snake_case JSON mapping of the service payloads.
namespace scs {

void to_json(nlohmann::json& j, const SearchResult& r);
void from_json(const nlohmann::json& j, SearchResult& r);
void to_json(nlohmann::json& j, const ResponseStats& s);
void from_json(const nlohmann::json& j, ResponseStats& s);
void to_json(nlohmann::json& j, const SearchResponse& r);
void from_json(const nlohmann::json& j, SearchResponse& r);

// "timeout_ms" carries the optional hint. from_json throws
// std::invalid_argument for an empty query or non-positive max_results.
void to_json(nlohmann::json& j, const SearchRequest& r);
void from_json(const nlohmann::json& j, SearchRequest& r);

nlohmann::json shard_info(const ShardMeta& meta);

// Serialises with invalid UTF-8 replaced rather than throwing.
std::string dump_json(const nlohmann::json& j);

}  // namespace scs
