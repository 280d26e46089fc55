#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace qbrown {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

/// Comma-separated table writer. Column names carry their units, e.g. "t[s]".
class CsvWriter {
public:
  CsvWriter(const std::string& path, std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  /// Row whose first column is text.
  void row(const std::string& label, const std::vector<double>& values);
  std::size_t columns() const { return columns_; }

private:
  std::ofstream out_;
  std::size_t columns_;
  std::string path_;
};

}  // namespace qbrown
