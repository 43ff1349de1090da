#include "scs/dataset.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "scs/error.hpp"

namespace scs {

FieldMap parse_field_map(const std::string& text) {
  FieldMap map;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw std::invalid_argument("field map entry must be field=key: " + item);
    }
    const auto field = item.substr(0, eq);
    auto key = item.substr(eq + 1);
    if (field == "id") map.id = key;
    else if (field == "repo") map.repo = key;
    else if (field == "revision") map.revision = key;
    else if (field == "path") map.path = key;
    else if (field == "prefix") map.prefix = key;
    else if (field == "suffix") map.suffix = key;
    else throw std::invalid_argument("unknown dataset field: " + field);
  }
  return map;
}

std::vector<CompletionPoint> parse_dataset(std::istream& in, const FieldMap& fields) {
  std::vector<CompletionPoint> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "dataset line " + std::to_string(number) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(where + e.what());
    }
    auto text = [&](const std::string& key) -> std::string {
      const auto it = j.find(key);
      if (it == j.end() || it->is_null()) throw Error(where + "missing field '" + key + "'");
      if (it->is_string()) return it->get<std::string>();
      if (it->is_number_integer()) return std::to_string(it->get<long long>());
      throw Error(where + "field '" + key + "' is not a string");
    };
    if (!j.is_object()) throw Error(where + "not a JSON object");
    CompletionPoint cp{text(fields.id),   text(fields.repo),   text(fields.revision),
                       text(fields.path), text(fields.prefix), text(fields.suffix)};
    if (!ids.insert(cp.id).second) throw Error(where + "duplicate id '" + cp.id + "'");
    out.push_back(std::move(cp));
  }
  return out;
}

std::vector<CompletionPoint> read_dataset(const std::filesystem::path& file, const FieldMap& fields) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open dataset " + file.string());
  return parse_dataset(in, fields);
}

}  // namespace scs
