#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "quench/error.hpp"
#include "quench/io.hpp"

using namespace quench;

TEST(Io, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  for (int k = 0; k < 2000; ++k) {
    const double x = std::ldexp(mant(rng), ex(rng));
    EXPECT_EQ(std::stod(io::format_double(x)), x);
  }
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_double(1.0), "1");
}

TEST(Io, SnapshotCsv) {
  const RadialGrid g(1, 1.0, 16);
  const RadialField u = RadialField::from_function(g, [](double r) { return 0.3 * (1.0 - r * r); });
  const std::string text = io::snapshot_csv(u);
  EXPECT_EQ(text.substr(0, 4), "r,u\n");
  const auto rows = io::parse_profile_csv(text);
  ASSERT_EQ(rows.size(), 16u);
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_EQ(rows[i].first, g.node(i));
    EXPECT_EQ(rows[i].second, u[i]);
  }
  EXPECT_THROW(io::parse_profile_csv("x,y\n0,1\n"), InvalidArgument);
  EXPECT_THROW(io::parse_profile_csv("r,u\n0,abc\n"), InvalidArgument);
}

TEST(Io, TraceCsvHeader) {
  std::vector<TraceRecord> trace(2);
  trace[1].step = 1;
  trace[1].t = 0.5;
  const std::string text = io::trace_csv(trace);
  EXPECT_EQ(text.substr(0, text.find('\n')), "step,t,dt,sup_u,gap,A,I,boundary_flux,A_running_min");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_NE(text.find("\n1,0.5,"), std::string::npos);
}

TEST(Io, AtomicWrite) {
  const auto dir = std::filesystem::temp_directory_path() / "quench_io_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "sub" / "out.csv";
  io::write_file_atomic(path, "first\n");
  io::write_file_atomic(path, "second\n");
  EXPECT_EQ(io::read_file(path), "second\n");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(path.parent_path())) ++entries;
  EXPECT_EQ(entries, 1u);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(io::read_file(path), Error);
}
