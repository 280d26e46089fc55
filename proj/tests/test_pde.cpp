#include <gtest/gtest.h>

#include <cmath>

#include "qbrown/pde.hpp"

using namespace qbrown;

namespace {
const PhysicalParams kNat = PhysicalParams::natural_units();
}

TEST(Grid, GeometryAndValidation) {
  const Grid1D g(-2.0, 3.0, 101);
  EXPECT_DOUBLE_EQ(g.h(), 0.05);
  EXPECT_EQ(g.x(100), 3.0);
  EXPECT_EQ(g.nodes().size(), 101u);
  EXPECT_THROW(Grid1D(0.0, 1.0, 8), ValidationError);
  EXPECT_THROW(Grid1D(1.0, 0.0, 100), ValidationError);
}

TEST(Density, GaussianMoments) {
  const Grid1D g(-10.0, 12.0, 2201);
  const auto rho = DensityField::gaussian(g, 1.0, 0.8);
  const auto m = moments(rho);
  EXPECT_NEAR(m.norm, 1.0, 1e-12);
  EXPECT_NEAR(m.mean, 1.0, 1e-10);
  EXPECT_NEAR(m.dispersion, 0.8, 1e-6);
  EXPECT_FALSE(m.warning);
}

TEST(QuantumPotential, GaussianAnalyticForm) {
  const Grid1D g(-6.0, 6.0, 2401);
  const double s2 = 0.7;
  const auto q = quantum_potential(DensityField::gaussian(g, 0.0, s2), kNat);
  for (int i = 200; i < 2200; i += 50) {
    const double x = g.x(i);
    const double exact = -0.5 * (x * x / (4 * s2 * s2) - 1.0 / (2 * s2));
    EXPECT_NEAR(q.Q[i], exact, 1e-4 * std::max(1.0, std::abs(exact))) << x;
  }
}

TEST(EffectivePotential, HarmonicSpringSoftening) {
  const auto p = kNat.with_omega0(2.0);
  const Grid1D g(-3.0, 3.0, 61);
  const double beta = 0.5;
  const auto u = effective_potential(PotentialSpec::harmonic(2.0), beta, p, g);
  for (int i = 0; i < g.n(); ++i) {
    const double x = g.x(i);
    const double exact = 2.0 * x * x + beta * (3.0 * 4.0 - beta * 16.0 * x * x) / 24.0;
    EXPECT_NEAR(u[i], exact, 1e-12);
  }
}

TEST(Evolve, ClassicalSmoluchowskiSpreadsLinearly) {
  const Grid1D g(-20.0, 20.0, 801);
  EvolveConfig cfg;
  cfg.t_final = 4.0;
  const auto res = evolve(DensityField::gaussian(g, 0.0, 0.5), PdeModel::ClassicalSmoluchowski,
                          PotentialSpec::free(), kNat, cfg);
  for (const auto& m : res.moments) EXPECT_NEAR(m.dispersion, 0.5 + 2.0 * m.t, 2e-3 * (0.5 + 2.0 * m.t));
  EXPECT_LT(res.max_mass_drift, 1e-12);
}

TEST(Evolve, HarmonicRelaxesToBoltzmannWidth) {
  const auto p = kNat.with_omega0(1.0);
  const Grid1D g(-10.0, 10.0, 801);
  EvolveConfig cfg;
  cfg.t_final = 10.0;
  const auto res = evolve(DensityField::gaussian(g, 1.0, 0.2), PdeModel::ClassicalSmoluchowski,
                          PotentialSpec::harmonic(1.0), p, cfg);
  const auto m = moments(res.final_density);
  EXPECT_NEAR(m.dispersion, 1.0, 1e-3);
  EXPECT_NEAR(m.mean, std::exp(-10.0), 1e-3);
}

TEST(Evolve, PeriodicBoundaryConservesMass) {
  const Grid1D g(-5.0, 5.0, 201);
  EvolveConfig cfg;
  cfg.t_final = 5.0;
  cfg.boundary = Boundary::Periodic;
  const auto res = evolve(DensityField::gaussian(g, 0.0, 0.3), PdeModel::ClassicalSmoluchowski,
                          PotentialSpec::free(), kNat, cfg);
  EXPECT_LT(res.max_mass_drift, 1e-12);
  const auto& rho = res.final_density.rho;
  EXPECT_NEAR(rho.front(), rho.back(), 1e-12);
}

TEST(Evolve, RejectsStepAboveStabilityBound) {
  const Grid1D g(-5.0, 5.0, 201);
  const double bound = stable_dt(PdeModel::ClassicalSmoluchowski, PotentialSpec::free(), kNat, g);
  EXPECT_NEAR(bound, 2.0 * g.h() * g.h() / 4.0, 1e-12);
  EvolveConfig cfg;
  cfg.t_final = 0.1;
  cfg.dt = 1.5 * bound;
  EXPECT_THROW(evolve(DensityField::gaussian(g, 0.0, 0.3), PdeModel::ClassicalSmoluchowski, PotentialSpec::free(),
                      kNat, cfg),
               ConfigError);
}

TEST(Evolve, ModelParameterMismatchIsConfigError) {
  const Grid1D g(-5.0, 5.0, 201);
  EvolveConfig cfg;
  cfg.t_final = 0.1;
  EXPECT_THROW(evolve(DensityField::gaussian(g, 0.0, 0.3), PdeModel::QuantumZeroT_Smoluchowski,
                      PotentialSpec::free(), kNat, cfg),
               ConfigError);
  EXPECT_THROW(evolve(DensityField::gaussian(g, 0.0, 0.3), PdeModel::ClassicalSmoluchowski,
                      PotentialSpec::harmonic(2.0), kNat.with_omega0(1.0), cfg),
               ConfigError);
}

TEST(Evolve, TelegraphStartsAtRest) {
  const Grid1D g(-15.0, 15.0, 1201);
  EvolveConfig cfg;
  cfg.t_final = 0.2;
  cfg.records = 20;
  const auto res = evolve(DensityField::gaussian(g, 0.0, 0.25), PdeModel::ClassicalTelegraph,
                          PotentialSpec::free(), kNat, cfg);
  // 2D[t - tau(1 - e^{-t/tau})] ~ D t^2 / tau for t << tau.
  for (const auto& m : res.moments)
    EXPECT_NEAR(m.dispersion - 0.25, 2.0 * (m.t - 1.0 + std::exp(-m.t)), 2e-4);
}

TEST(Models, NamesRoundTrip) {
  for (auto m : {PdeModel::ClassicalTelegraph, PdeModel::ClassicalSmoluchowski, PdeModel::SemiclassicalTelegraph,
                 PdeModel::SemiclassicalSmoluchowski, PdeModel::QuantumZeroT_Telegraph,
                 PdeModel::QuantumZeroT_Smoluchowski})
    EXPECT_EQ(pde_model_from_string(to_string(m)), m);
  EXPECT_FALSE(pde_model_from_string("diffusion"));
}
