#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scs/miner.hpp"

namespace scs {

// JSON key for each record field.
struct FieldMap {
  std::string id = "id";
  std::string repo = "repo";
  std::string revision = "revision";
  std::string path = "path";
  std::string prefix = "prefix";
  std::string suffix = "suffix";
};

// "field=key,field=key", e.g. "repo=repository,id=task_id". Throws
// std::invalid_argument on an unknown field name.
FieldMap parse_field_map(const std::string& text);

// One JSON object per line; blank lines ignored. Throws Error naming the
// line on malformed input or a repeated id.
std::vector<CompletionPoint> read_dataset(const std::filesystem::path& file, const FieldMap& fields = {});
std::vector<CompletionPoint> parse_dataset(std::istream& in, const FieldMap& fields = {});

}  // namespace scs
