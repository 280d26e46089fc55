#include <gtest/gtest.h>

#include <charconv>
#include <cstring>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "qbrown/csv.hpp"
#include "qbrown/params.hpp"

using namespace qbrown;

TEST(Csv, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5e-300), "-2.5e-300");
  EXPECT_EQ(format_double(INFINITY), "inf");
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int k = 0; k < 10000; ++k) {
    const std::uint64_t u = bits(rng);
    double v;
    std::memcpy(&v, &u, sizeof v);
    if (!std::isfinite(v)) continue;
    const auto s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v) << s;
  }
}

TEST(Csv, WritesHeaderAndRows) {
  const auto path = (std::filesystem::temp_directory_path() / "qbrown_csv_test.csv").string();
  {
    CsvWriter w(path, {"t[time]", "x[length]"});
    w.row({0.5, 1e-20});
    EXPECT_THROW(w.row({1.0}), Error);
  }
  std::ifstream in(path);
  std::string a, b;
  std::getline(in, a);
  std::getline(in, b);
  EXPECT_EQ(a, "t[time],x[length]");
  EXPECT_EQ(b, "0.5,1e-20");
  std::filesystem::remove(path);
}
