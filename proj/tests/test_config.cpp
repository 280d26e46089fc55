#include <gtest/gtest.h>

#include "qbrown/config.hpp"

using namespace qbrown;

namespace {

std::vector<ConfigIssue> issues_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigParseError& e) {
    return e.issues();
  }
  return {};
}

}  // namespace

TEST(Config, MinimalConfigFillsDefaults) {
  const auto cfg = parse_config("scenario = free-high-friction\n");
  EXPECT_EQ(cfg.scenario, "free-high-friction");
  EXPECT_TRUE(cfg.is_default("params.mass"));
  EXPECT_EQ(cfg.number("params.mass"), 1.0);
  EXPECT_EQ(cfg.text("time.unit"), "t_c");
  EXPECT_EQ(cfg.integer("time.points"), 60);
  EXPECT_EQ(cfg.list("models").size(), 5u);
  EXPECT_FALSE(cfg.has("pde.n"));
  EXPECT_EQ(cfg.params.temperature(), 1.0);
}

TEST(Config, ScenarioSpecificDefaults) {
  const auto cfg = parse_config("scenario = vacuum-spreading");
  EXPECT_EQ(cfg.params.friction(), 0.0);
  EXPECT_EQ(cfg.params.temperature(), 0.0);
  EXPECT_EQ(cfg.number("init.sigma0"), 1.0);
  EXPECT_EQ(cfg.text("time.spacing"), "linear");
}

TEST(Config, CommentsWhitespaceAndOverrides) {
  const auto cfg = parse_config(
      "# header\n"
      "  scenario = classical-telegraph   # trailing\n"
      "\n"
      "params.temperature = 2.5\n"
      "pde.n=1024\n");
  EXPECT_EQ(cfg.params.temperature(), 2.5);
  EXPECT_EQ(cfg.integer("pde.n"), 1024);
  EXPECT_EQ(cfg.values.at("pde.n").line, 5);
  EXPECT_TRUE(cfg.is_auto("pde.dt"));
}

TEST(Config, NegativeMassIsTheOnlyIssue) {
  const auto issues = issues_of("scenario = free-high-friction\nparams.mass = -1\n");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].line, 2);
  EXPECT_NE(issues[0].message.find("mass"), std::string::npos);
}

TEST(Config, DuplicateKeyReportsBothLines) {
  const auto issues = issues_of("scenario = harmonic\nparams.omega0 = 2\n# gap\nparams.omega0 = 3\n");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].line, 4);
  EXPECT_NE(issues[0].message.find("duplicate key"), std::string::npos);
  EXPECT_NE(issues[0].message.find("lines 2 and 4"), std::string::npos);
}

TEST(Config, CollectsEveryError) {
  const auto issues = issues_of(
      "scenario = equilibrium\n"
      "eq.n = ten\n"
      "bogus.key = 1\n"
      "pde.n = 100\n"
      "eq.potential = cubic\n"
      "no equals sign\n"
      "params.friction = -2\n");
  ASSERT_EQ(issues.size(), 6u);
  for (std::size_t i = 0; i < issues.size(); ++i) EXPECT_EQ(issues[i].line, static_cast<int>(i) + 2);
  EXPECT_NE(issues[1].message.find("unknown key"), std::string::npos);
  EXPECT_NE(issues[2].message.find("does not apply"), std::string::npos);
}

TEST(Config, MissingOrUnknownScenario) {
  auto issues = issues_of("params.mass = 2\n");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].line, 0);
  EXPECT_NE(issues[0].message.find("scenario"), std::string::npos);
  issues = issues_of("scenario = teleport\n");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].line, 1);
}

TEST(Config, ScenarioRequirementsOnParameters) {
  const auto issues = issues_of("scenario = free-zero-T\nparams.temperature = 1\n");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].line, 2);
  EXPECT_NO_THROW(parse_config("scenario = free-zero-T\n"));
}

TEST(Config, ModelListValidated) {
  EXPECT_NO_THROW(parse_config("scenario = dispersion-compare\nmodels = einstein, lambert-exact\n"));
  const auto issues = issues_of("scenario = dispersion-compare\nmodels = einstein, magic\n");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_NE(issues[0].message.find("magic"), std::string::npos);
}

TEST(Config, ErrorMessageListsLines) {
  try {
    parse_config("scenario = harmonic\nparams.mass = 0\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Config, UnreadableFile) { EXPECT_THROW(load_config("/nonexistent/cfg.txt"), ConfigError); }
