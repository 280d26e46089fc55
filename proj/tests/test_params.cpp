#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qbrown/params.hpp"

using namespace qbrown;

TEST(Params, ScaleIdentityHoldsForRandomParameters) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logu(-6.0, 6.0);
  for (int k = 0; k < 200; ++k) {
    RawParams r;
    r.hbar = std::pow(10.0, logu(rng));
    r.k_B = std::pow(10.0, logu(rng));
    r.mass = std::pow(10.0, logu(rng));
    r.friction = std::pow(10.0, logu(rng));
    r.temperature = std::pow(10.0, logu(rng));
    const auto p = make_params(r);
    const auto s = derived_scales(p);
    const double kT = r.k_B * r.temperature;
    EXPECT_NEAR(s.lambda_T / (r.hbar / (2.0 * std::sqrt(r.mass * kT))), 1.0, 1e-15);
    EXPECT_NEAR(s.D / (kT / r.friction), 1.0, 1e-15);
    EXPECT_NEAR(s.t_c / (s.lambda_T * s.lambda_T / (2.0 * s.D)), 1.0, 4e-16);
    EXPECT_NEAR(s.tau_m / (r.mass / r.friction), 1.0, 1e-15);
  }
}

TEST(Params, NaturalUnitsScales) {
  const auto s = derived_scales(PhysicalParams::natural_units());
  EXPECT_DOUBLE_EQ(s.lambda_T, 0.5);
  EXPECT_DOUBLE_EQ(s.D, 1.0);
  EXPECT_DOUBLE_EQ(s.t_c, 0.125);
  EXPECT_DOUBLE_EQ(s.tau_m, 1.0);
  EXPECT_TRUE(s.overdamped_quantum_regime() == (0.25 > 1.0));
}

TEST(Params, RejectsInvalidValuesNamingTheField) {
  RawParams r;
  r.mass = -1.0;
  try {
    make_params(r);
    FAIL() << "negative mass accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("mass"), std::string::npos);
  }
  r = RawParams{};
  r.temperature = -0.5;
  EXPECT_THROW(make_params(r), ValidationError);
  r = RawParams{};
  r.hbar = std::nan("");
  EXPECT_THROW(make_params(r), ValidationError);
}

TEST(Params, ScalesUndefinedAtZeroTemperatureOrFriction) {
  const auto p = PhysicalParams::natural_units();
  EXPECT_THROW(derived_scales(p.with_temperature(0.0)), DomainError);
  EXPECT_THROW(derived_scales(p.with_friction(0.0)), DomainError);
  EXPECT_THROW(p.with_temperature(0.0).beta(), DomainError);
}

TEST(Params, WithBetaInvertsTemperature) {
  const auto p = PhysicalParams::natural_units().with_beta(4.0);
  EXPECT_DOUBLE_EQ(p.temperature(), 0.25);
  EXPECT_DOUBLE_EQ(p.beta(), 4.0);
}

TEST(Params, MomentumDispersionMeetsHeisenbergBound) {
  const auto p = PhysicalParams::natural_units();
  for (double s : {1e-6, 0.1, 1.0, 100.0}) {
    EXPECT_DOUBLE_EQ(momentum_dispersion(s, p), 1.0 + 0.25 / s);
    EXPECT_GE(s * momentum_dispersion(s, p), 0.25);
  }
  EXPECT_DOUBLE_EQ(momentum_dispersion(0.5, p.with_temperature(0.0)), 0.5);
}
