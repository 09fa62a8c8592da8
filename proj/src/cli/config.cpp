#include "eprsim/cli/config.hpp"

#include <cmath>

namespace eprsim::cli {

using nlohmann::json;

ConfigView::ConfigView(const json& node, std::string path) : node_(node), path_(std::move(path)) {
  if (!node_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be a JSON object");
}

json ConfigView::parse_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  check_document(doc);
  return doc;
}

void ConfigView::check_document(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "must be a JSON object");
  if (!doc.contains("schema_version")) throw ConfigError("schema_version", "missing");
  const auto& v = doc["schema_version"];
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
    throw ConfigError("schema_version", "must be " + std::to_string(kSchemaVersion));
  if (doc.contains("seed") && !doc["seed"].is_number_integer()) throw ConfigError("seed", "must be an integer");
}

bool ConfigView::has(std::string_view key) const { return node_.contains(std::string(key)); }

std::string ConfigView::field(std::string_view key) const {
  return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

const json& ConfigView::at(std::string_view key) const {
  const auto it = node_.find(std::string(key));
  if (it == node_.end()) throw ConfigError(field(key), "missing");
  return *it;
}

ConfigView ConfigView::block(std::string_view key) const {
  const json& j = at(key);
  if (!j.is_object()) throw ConfigError(field(key), "must be a JSON object");
  return {j, field(key)};
}

std::optional<ConfigView> ConfigView::optional_block(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return block(key);
}

double ConfigView::number(std::string_view key) const {
  const json& j = at(key);
  if (!j.is_number()) throw ConfigError(field(key), "must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field(key), "must be finite");
  return v;
}

double ConfigView::number_or(std::string_view key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int ConfigView::integer(std::string_view key) const {
  const json& j = at(key);
  if (!j.is_number_integer()) throw ConfigError(field(key), "must be an integer");
  return j.get<int>();
}

int ConfigView::integer_or(std::string_view key, int fallback) const { return has(key) ? integer(key) : fallback; }

bool ConfigView::boolean_or(std::string_view key, bool fallback) const {
  if (!has(key)) return fallback;
  const json& j = at(key);
  if (!j.is_boolean()) throw ConfigError(field(key), "must be true or false");
  return j.get<bool>();
}

std::string ConfigView::string_or(std::string_view key, std::string fallback) const {
  if (!has(key)) return fallback;
  const json& j = at(key);
  if (!j.is_string()) throw ConfigError(field(key), "must be a string");
  return j.get<std::string>();
}

std::vector<double> ConfigView::numbers(std::string_view key) const {
  const json& j = at(key);
  if (!j.is_array()) throw ConfigError(field(key), "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number() || !std::isfinite(j[i].get<double>()))
      throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "must be a finite number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

}  // namespace eprsim::cli
