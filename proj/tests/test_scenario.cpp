#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qbrown/scenario.hpp"

using namespace qbrown;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("qbrown_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string header(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST(Scenario, DispersionCompareWritesOneColumnPerModel) {
  const auto dir = scratch("compare");
  const auto cfg = parse_config("scenario = dispersion-compare\n");
  const auto out = run_scenario(cfg, {dir.string(), 1});
  EXPECT_EQ(out.exit_code, 0) << out.cause;
  const auto head = header(dir / "trajectory.csv");
  for (auto m : {"einstein", "pure-quantum", "superposition", "lambert-exact", "coth-interpolation",
                 "semiclassical-log", "elementary-log-approx", "overdamped-bounded", "overdamped-full"})
    EXPECT_NE(head.find(std::string("sigma_x2:") + m + "["), std::string::npos) << m;
  const auto manifest = slurp(dir / "manifest.txt");
  EXPECT_NE(manifest.find("PASS ordering:lambert-exact <= superposition"), std::string::npos);
  EXPECT_EQ(manifest.find("FAIL "), std::string::npos);
  EXPECT_NE(manifest.find("params.mass = 1  # default"), std::string::npos);
  EXPECT_NE(manifest.find("comparison.csv"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "comparison.csv"));
}

TEST(Scenario, OutputIsDeterministic) {
  const auto cfg = parse_config("scenario = free-high-friction\ntime.points = 12\n");
  const auto a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(run_scenario(cfg, {a.string(), 1}).exit_code, 0);
  ASSERT_EQ(run_scenario(cfg, {b.string(), 1}).exit_code, 0);
  EXPECT_EQ(slurp(a / "trajectory.csv"), slurp(b / "trajectory.csv"));
}

TEST(Scenario, EquilibriumWritesThreeDensities) {
  const auto dir = scratch("eq");
  const auto cfg = parse_config("scenario = equilibrium\nparams.omega0 = 1\nparams.temperature = 0.5\n");
  const auto out = run_scenario(cfg, {dir.string(), 2});
  EXPECT_EQ(out.exit_code, 0) << out.cause;
  EXPECT_EQ(header(dir / "density_imaginary_time.csv"), "x[length],rho[1/length],Q[energy],S_Q[energy/temperature]");
  EXPECT_TRUE(fs::exists(dir / "density_eigen.csv"));
  EXPECT_TRUE(fs::exists(dir / "density_semiclassical.csv"));
  EXPECT_NE(slurp(dir / "manifest.txt").find("imaginary-time-vs-eigen"), std::string::npos);
}

TEST(Scenario, VacuumSpreadingPassesItsCheck) {
  const auto dir = scratch("vac");
  const auto out = run_scenario(parse_config("scenario = vacuum-spreading\n"), {dir.string(), 1});
  EXPECT_EQ(out.exit_code, 0) << out.cause;
  EXPECT_NE(slurp(dir / "manifest.txt").find("PASS free-spreading-law"), std::string::npos);
}

TEST(Scenario, PdeScenarioWritesDensities) {
  const auto dir = scratch("pde");
  const auto cfg = parse_config("scenario = classical-telegraph\npde.t_final = 2\n");
  const auto out = run_scenario(cfg, {dir.string(), 1});
  EXPECT_EQ(out.exit_code, 0) << out.cause;
  EXPECT_TRUE(fs::exists(dir / "density_initial.csv"));
  EXPECT_TRUE(fs::exists(dir / "density_final.csv"));
  EXPECT_NE(header(dir / "trajectory.csv").find("sigma_x2_reference"), std::string::npos);
}

TEST(Scenario, ConfigErrorsExitWithTwo) {
  const auto dir = scratch("bad");
  const auto cfg = parse_config("scenario = classical-telegraph\npde.dt = 10\n");
  const auto out = run_scenario(cfg, {dir.string(), 1});
  EXPECT_EQ(out.exit_code, 2);
  EXPECT_NE(slurp(dir / "manifest.txt").find("exit_code = 2"), std::string::npos);
}

TEST(Scenario, DescribesScales) {
  const auto s = describe_scales(PhysicalParams::natural_units());
  EXPECT_NE(s.find("t_c = 0.125"), std::string::npos);
  EXPECT_NE(describe_scales(PhysicalParams::natural_units().with_temperature(0.0)).find("undefined"),
            std::string::npos);
}
