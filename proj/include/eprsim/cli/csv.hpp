#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace eprsim::cli {

// Fixed float formatting for every emitted table: %.17g, so values round-trip
// exactly and output is byte-stable across runs.
std::string format_double(double value);

class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header);

  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);

  const std::string& str() const { return buffer_; }

 private:
  std::size_t columns_;
  std::string buffer_;
};

}  // namespace eprsim::cli
