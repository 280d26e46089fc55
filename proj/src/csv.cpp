#include "qbrown/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "qbrown/params.hpp"

namespace qbrown {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> columns)
    : out_(path, std::ios::binary), columns_(columns.size()), path_(path) {
  if (!out_) throw Error("cannot write '" + path + "'");
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw Error("row width does not match header of '" + path_ + "'");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << '\n';
  if (!out_) throw Error("write failed for '" + path_ + "'");
}

void CsvWriter::row(const std::string& label, const std::vector<double>& values) {
  if (values.size() + 1 != columns_) throw Error("row width does not match header of '" + path_ + "'");
  out_ << label;
  for (double v : values) out_ << ',' << format_double(v);
  out_ << '\n';
  if (!out_) throw Error("write failed for '" + path_ + "'");
}

}  // namespace qbrown
