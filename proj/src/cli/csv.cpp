#include "eprsim/cli/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace eprsim::cli {

std::string format_double(double value) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, std::size_t(n));
}

CsvWriter::CsvWriter(std::initializer_list<std::string_view> header) : columns_(header.size()) {
  bool first = true;
  for (auto h : header) {
    if (!first) buffer_ += ',';
    buffer_ += h;
    first = false;
  }
  buffer_ += '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::logic_error("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += format_double(values[i]);
  }
  buffer_ += '\n';
}

}  // namespace eprsim::cli
