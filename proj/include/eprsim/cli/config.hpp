#pragma once

// Path-aware accessors over the JSON run configuration. Every failure is a
// ConfigError naming the offending field, e.g. "nopa.epsilon".

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace eprsim::cli {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ConfigView {
 public:
  ConfigView(const nlohmann::json& node, std::string path);

  // Parses a document and checks schema_version.
  static nlohmann::json parse_document(std::string_view text);
  // Root must be an object with the current schema_version; seed, if given,
  // must be an integer (reserved; every computation is deterministic).
  static void check_document(const nlohmann::json& doc);

  bool has(std::string_view key) const;
  std::string field(std::string_view key) const;

  ConfigView block(std::string_view key) const;
  std::optional<ConfigView> optional_block(std::string_view key) const;

  double number(std::string_view key) const;
  double number_or(std::string_view key, double fallback) const;
  int integer(std::string_view key) const;
  int integer_or(std::string_view key, int fallback) const;
  bool boolean_or(std::string_view key, bool fallback) const;
  std::string string_or(std::string_view key, std::string fallback) const;
  std::vector<double> numbers(std::string_view key) const;

  const nlohmann::json& node() const { return node_; }
  const std::string& path() const { return path_; }

 private:
  const nlohmann::json& at(std::string_view key) const;

  const nlohmann::json& node_;
  std::string path_;
};

}  // namespace eprsim::cli
