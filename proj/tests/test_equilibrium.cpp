#include <gtest/gtest.h>

#include <cmath>

#include "qbrown/equilibrium.hpp"

using namespace qbrown;

namespace {
const PhysicalParams kNat = PhysicalParams::natural_units();

double coth_width(double beta, double w) { return 1.0 / (2.0 * w * std::tanh(beta * w / 2.0)); }
}  // namespace

TEST(Spectrum, HarmonicLevels) {
  const auto p = kNat.with_omega0(1.0);
  const auto s = spectrum(PotentialSpec::harmonic(1.0), p, Grid1D(-10.0, 10.0, 2001), 8);
  ASSERT_EQ(s.count(), 8);
  for (int n = 0; n < 8; ++n) EXPECT_NEAR(s.energies[n], n + 0.5, 1e-5 * (n + 1) * (n + 1));
}

TEST(Spectrum, StatesAreOrthonormal) {
  const Grid1D g(-6.0, 6.0, 601);
  const auto s = spectrum(PotentialSpec::quartic(1.0), kNat, g, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double dot = 0.0;
      for (int i = 0; i < g.n(); ++i) dot += (i == 0 || i == g.n() - 1 ? 0.5 : 1.0) * s.states[a][i] * s.states[b][i];
      EXPECT_NEAR(dot * g.h(), a == b ? 1.0 : 0.0, 1e-10);
    }
}

TEST(EigenDensity, HarmonicWidthIsCoth) {
  for (double beta : {0.5, 2.0, 8.0}) {
    const auto p = kNat.with_omega0(1.0).with_beta(beta);
    const double L = std::max(8.0, 12.0 * std::sqrt(coth_width(beta, 1.0)));
    const auto e = eigen_density(PotentialSpec::harmonic(1.0), p, beta, Grid1D(-L, L, 1601));
    EXPECT_NEAR(moments(e.density).dispersion / coth_width(beta, 1.0), 1.0, 1e-4) << beta;
    EXPECT_LE(e.tail_weight, 1e-12);
    EXPECT_NEAR(e.Z, 0.5 / std::sinh(beta / 2.0), 1e-3 * e.Z);
  }
}

TEST(ImaginaryTime, HarmonicAgreesWithEigenAndSpectralRoutes) {
  const auto p = kNat.with_omega0(1.0).with_beta(2.0);
  const Grid1D g(-8.0, 8.0, 801);
  const auto U = PotentialSpec::harmonic(1.0);
  const auto it = imaginary_time_density(U, p, {2.0, 2048, g});
  const auto eig = eigen_density(U, p, 2.0, g);
  const auto sp = spectral_propagation_density(U, p, 2.0, g);
  double d_eig = 0.0, d_sp = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    d_eig = std::max(d_eig, std::abs(it.density.rho[i] - eig.density.rho[i]));
    d_sp = std::max(d_sp, std::abs(it.density.rho[i] - sp.density.rho[i]));
  }
  EXPECT_LT(d_eig, 2e-5);
  EXPECT_LT(d_sp, 1e-6);
  EXPECT_NEAR(it.Z / sp.Z, 1.0, 1e-6);
  EXPECT_NEAR(it.log_Z, std::log(it.Z), 1e-12);
}

TEST(ImaginaryTime, PeriodicFreeStaysUniform) {
  const Grid1D g(-3.0, 3.0, 301);
  const auto it =
      imaginary_time_density(PotentialSpec::free(), kNat.with_beta(1.5), {1.5, 256, g, true, Boundary::Periodic});
  for (double r : it.density.rho) EXPECT_NEAR(r, 1.0 / 6.0, 1e-12);
}

TEST(Semiclassical, HarmonicEffectiveSpring) {
  const double beta = 0.3;
  const auto p = kNat.with_omega0(1.0).with_beta(beta);
  const Grid1D g(-25.0, 25.0, 2001);
  const auto rho = semiclassical_density(PotentialSpec::harmonic(1.0), p, beta, g);
  const double expected = 1.0 / (beta * (1.0 - beta * beta / 12.0));
  EXPECT_NEAR(moments(rho).dispersion / expected, 1.0, 1e-6);
  EXPECT_NEAR(moments(rho).dispersion / coth_width(beta, 1.0), 1.0, 5e-3);
}

TEST(Semiclassical, QuarticSexticTermIsNotConfining) {
  // U_eff picks up -beta^2 hbar^2 k4^2 x^6 / 24m, which wins at large |x|.
  const double beta = 2.0;
  const auto p = kNat.with_beta(beta);
  EXPECT_THROW(semiclassical_density(PotentialSpec::quartic(0.5), p, beta, Grid1D(-6.0, 6.0, 601)), DomainError);
  EXPECT_NO_THROW(semiclassical_density(PotentialSpec::free(), p, beta, Grid1D(-6.0, 6.0, 601)));
}

TEST(Entropy, VanishesForUniformPath) {
  const Grid1D g(-3.0, 3.0, 101);
  const std::vector<double> betas = {0.0, 0.5, 1.0};
  const std::vector<DensityField> rhos(3, DensityField::uniform(g));
  const auto S = quantum_entropy(rhos, betas, kNat);
  ASSERT_EQ(S.size(), 101u);
  for (double s : S) EXPECT_NEAR(s, 0.0, 1e-12);
}

TEST(Entropy, MatchesHarmonicGaussianPath) {
  // Along a Gaussian path Q is quadratic; check S at the centre against the
  // trapezoid oracle k_B (beta Q(beta) - int Q) built from the analytic Q.
  const Grid1D g(-12.0, 12.0, 1201);
  const std::vector<double> betas = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<DensityField> rhos = {DensityField::uniform(g)};
  std::vector<double> q0 = {0.0};
  for (std::size_t k = 1; k < betas.size(); ++k) {
    const double s2 = coth_width(betas[k], 1.0);
    rhos.push_back(DensityField::gaussian(g, 0.0, s2));
    q0.push_back(0.5 / (2.0 * s2));
  }
  const auto S = quantum_entropy(rhos, betas, kNat);
  double integral = 0.0;
  for (std::size_t k = 1; k < betas.size(); ++k) integral += 0.5 * (q0[k] + q0[k - 1]) * 0.25;
  EXPECT_NEAR(S[600], 1.0 * q0.back() - integral, 5e-3 * std::abs(q0.back()));
}
