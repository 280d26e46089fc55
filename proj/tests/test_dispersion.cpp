#include <gtest/gtest.h>

#include <cmath>

#include "qbrown/dispersion.hpp"

using namespace qbrown;

namespace {

const PhysicalParams kNat = PhysicalParams::natural_units();

std::vector<double> with_origin(std::vector<double> t) {
  t.insert(t.begin(), 0.0);
  return t;
}

}  // namespace

TEST(ClosedForms, MatchIndependentFormulas) {
  const auto p = kNat.with_mass(2.0).with_friction(3.0).with_temperature(0.7).with_hbar(1.3);
  const double kT = 0.7, m = 2.0, b = 3.0, hb = 1.3;
  const double D = kT / b, lam = hb / (2.0 * std::sqrt(m * kT));
  for (double t : {1e-4, 0.1, 2.0, 50.0}) {
    const double pq = hb * std::sqrt(t / (m * b));
    EXPECT_NEAR(eval_closed_form(ClosedFormKind::Einstein, t, p).sigma_x2, 2 * D * t, 1e-15 * t);
    EXPECT_NEAR(eval_closed_form(ClosedFormKind::PureQuantum, t, p).sigma_x2 / pq, 1.0, 1e-15);
    EXPECT_NEAR(eval_closed_form(ClosedFormKind::Superposition, t, p).sigma_x2 / (pq + 2 * D * t), 1.0, 1e-15);
    const double u = std::sqrt(D * t);
    EXPECT_NEAR(eval_closed_form(ClosedFormKind::CothInterpolation, t, p).sigma_x2 /
                    (2 * lam * u / std::tanh(lam / u)), 1.0, 1e-14);
    EXPECT_NEAR(eval_closed_form(ClosedFormKind::ElementaryLogApprox, t, p).sigma_x2 /
                    (2 * D * t + 2 * lam * lam * std::log(1 + u / lam)), 1.0, 1e-14);
  }
  const double t = 3.0;
  EXPECT_NEAR(eval_closed_form(ClosedForm::vacuum_spreading(0.4), t, p.with_friction(0.0)).sigma_x2,
              0.16 + std::pow(hb * t / (2 * m * 0.4), 2), 1e-13);
}

TEST(ClosedForms, InapplicableParametersAreConfigErrors) {
  EXPECT_THROW(eval_closed_form(ClosedFormKind::Einstein, 1.0, kNat.with_temperature(0.0)), ConfigError);
  EXPECT_THROW(eval_closed_form(ClosedFormKind::PureQuantum, 1.0, kNat.with_friction(0.0)), ConfigError);
}

TEST(ClosedForms, SemiclassicalLogFlagsShortTimes) {
  const auto v = eval_closed_form(ClosedFormKind::SemiclassicalLog, 1e-3, kNat);
  EXPECT_TRUE(v.semiclassical_defect);
  EXPECT_FALSE(eval_closed_form(ClosedFormKind::SemiclassicalLog, 10.0, kNat).semiclassical_defect);
}

TEST(Lambert, SatisfiesImplicitBoundedLaw) {
  const auto s = derived_scales(kNat);
  const double l2 = s.lambda_T * s.lambda_T;
  for (double f : {1e-6, 1e-3, 1.0, 1e3, 1e6, 1e9}) {
    const double t = f * s.t_c;
    const double y = eval_closed_form(ClosedFormKind::LambertExact, t, kNat).sigma_x2 / l2;
    const double z = 2 * s.D * t / l2;
    EXPECT_NEAR((y - std::log1p(y)) / z, 1.0, 1e-12) << f;
  }
}

TEST(Lambert, BoundedOdeAgrees) {
  const auto s = derived_scales(kNat);
  const auto t = log_space(1e-3 * s.t_c, 1e3 * s.t_c, 40);
  const auto tr = solve_overdamped_bounded(kNat, 0.0, with_origin(t));
  for (std::size_t i = 0; i < t.size(); ++i)
    EXPECT_NEAR(tr.sigma_x2[i + 1] / eval_closed_form(ClosedFormKind::LambertExact, t[i], kNat).sigma_x2, 1.0, 1e-8);
}

TEST(Heisenberg, EinsteinViolatesBeforeDecoherenceTime) {
  const auto s = derived_scales(kNat);
  const std::vector<double> t = {0.1 * s.t_c, 0.9 * s.t_c, 1.1 * s.t_c, 10 * s.t_c};
  const auto e = closed_form_trajectory(ClosedForm{ClosedFormKind::Einstein}, t, kNat);
  EXPECT_EQ(first_heisenberg_violation(e, kNat), std::optional<std::size_t>(0));
  const auto tail = closed_form_trajectory(ClosedForm{ClosedFormKind::Einstein},
                                           std::vector<double>(t.begin() + 2, t.end()), kNat);
  EXPECT_FALSE(first_heisenberg_violation(tail, kNat));
  const auto q = closed_form_trajectory(ClosedForm{ClosedFormKind::Superposition}, t, kNat);
  EXPECT_FALSE(first_heisenberg_violation(q, kNat));
}

TEST(BetaGrid, StartsAtZeroAndHitsPhysicalBeta) {
  const auto g = make_beta_grid(4.0, 33, 1e-4, 1.0);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 4.0);
  EXPECT_EQ(g.size(), 33u);
  EXPECT_NE(std::find(g.begin(), g.end(), 1.0), g.end());
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
}

TEST(Inertial, VacuumSpreadingMatchesClosedForm) {
  const auto p = kNat.with_friction(0.0).with_temperature(0.0);
  std::vector<double> t;
  for (int i = 0; i <= 50; ++i) t.push_back(0.2 * i);
  const auto tr = solve_inertial_zero_T(p, InertialInit{0.5, 0.0, 1.0, 0.3}, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double exact = 0.25 + std::pow(t[i] / (2 * 0.5), 2);
    EXPECT_NEAR(tr.sigma_x2[i] / exact, 1.0, 1e-8);
    EXPECT_NEAR(tr.mu[i], 1.0 + 0.3 * t[i], 1e-8);
  }
}

TEST(Inertial, OverdampedQuarticLaw) {
  const auto p = kNat.with_friction(100.0).with_temperature(0.0);
  const double s0 = 0.3;
  InertialInit init{s0};
  init.sigma_dot0 = 1.0 / (4.0 * 100.0 * std::pow(s0, 3));
  const auto t = log_space(0.1, 10.0, 20);
  const auto tr = solve_inertial_zero_T(p, init, with_origin(t));
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double target = std::sqrt(std::pow(s0, 4) + t[i] / 100.0);
    EXPECT_NEAR(tr.sigma_x2[i + 1] / target, 1.0, 0.01);
  }
}

TEST(Harmonic, StationaryMatchesCoth) {
  const auto p = kNat.with_omega0(1.3).with_mass(0.8);
  for (double beta : {0.05, 0.7, 3.0, 20.0}) {
    const auto q = p.with_beta(beta);
    const double exact = 1.0 / (2 * 0.8 * 1.3) / std::tanh(beta * 1.3 / 2);
    EXPECT_NEAR(harmonic_equilibrium_dispersion(beta, q) / exact, 1.0, 1e-14);
    EXPECT_NEAR(stationary_harmonic_dispersion(beta, q).sigma_x2 / exact, 1.0, 1e-7) << beta;
  }
}

TEST(Harmonic, DynamicsRelaxToEquilibrium) {
  const auto p = kNat.with_omega0(1.0).with_beta(2.0);
  std::vector<double> t;
  for (int i = 0; i <= 150; ++i) t.push_back(i);
  const auto sol = solve_harmonic(p, HarmonicInit{0.3, 0.0, 0.5}, t, make_beta_grid(2.0, 129));
  EXPECT_NEAR(sol.trajectory.sigma_x2.back() / harmonic_equilibrium_dispersion(2.0, p), 1.0, 1e-5);
  EXPECT_NEAR(sol.trajectory.mu.back(), 0.0, 1e-10);
  EXPECT_TRUE(std::isinf(sol.surface.at(5, 0)));
}

// Independent oracle for the self-consistent high-friction law: method of
// lines in beta with trapezoid quadrature, integrated by the adaptive solver
// from a superposition start.
TEST(OverdampedFull, AgreesWithMethodOfLinesOracle) {
  const auto p = kNat;
  std::vector<double> beta = {0.0};
  const int nb = 160;
  for (int j = 0; j < nb; ++j) beta.push_back(std::pow(10.0, -4.0 + 4.0 * j / (nb - 1)));
  const double t0 = 1e-9;
  std::vector<double> y0;
  for (int j = 1; j <= nb; ++j) y0.push_back(std::sqrt(t0) + 2.0 * t0 / beta[j]);
  auto rhs = [&](double, std::span<const double> s, std::span<double> d) {
    double integral = 0.0;
    double prev = 0.0;  // 1/s^2 at beta = 0, where s is infinite
    for (int j = 1; j <= nb; ++j) {
      const double cur = 0.25 / (s[j - 1] * s[j - 1]);
      integral += 0.5 * (prev + cur) * (beta[j] - beta[j - 1]);
      prev = cur;
      d[j - 1] = 2.0 / beta[j] * (1.0 + s[j - 1] * integral);
    }
  };
  const auto sc = derived_scales(p);
  const std::vector<double> times = {0.01 * sc.t_c, sc.t_c, 10 * sc.t_c, 100 * sc.t_c};
  std::vector<double> grid = {t0};
  grid.insert(grid.end(), times.begin(), times.end());
  OdeSolverConfig cfg;
  cfg.rel_tol = 1e-9;
  cfg.abs_tol = 1e-14;
  const auto oracle = solve_ode(rhs, y0, grid, cfg);

  const auto full = solve_overdamped_full(p, with_origin(times), make_beta_grid(1.0, 97));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double ref = oracle.states[i + 1].back();
    EXPECT_NEAR(full.trajectory.sigma_x2[i + 1] / ref, 1.0, 2e-3) << times[i];
  }
  EXPECT_GT(full.windows, 0);
  EXPECT_FALSE(full.residuals.empty());
}

TEST(OverdampedFull, PreviousIterateVariantConverges) {
  const auto sc = derived_scales(kNat);
  const std::vector<double> t = {0.0, sc.t_c, 10 * sc.t_c};
  OverdampedFullConfig cfg;
  cfg.outer = OuterDispersion::PreviousIterate;
  const auto a = solve_overdamped_full(kNat, t, make_beta_grid(1.0, 65), cfg);
  const auto b = solve_overdamped_full(kNat, t, make_beta_grid(1.0, 65));
  EXPECT_NEAR(a.trajectory.sigma_x2.back() / b.trajectory.sigma_x2.back(), 1.0, 1e-5);
}

TEST(Compare, OrderingsHoldInNaturalUnits) {
  const auto sc = derived_scales(kNat);
  const auto t = log_space(1e-3 * sc.t_c, 1e3 * sc.t_c, 60);
  std::vector<ModelSpec> models;
  for (auto n : {"einstein", "pure-quantum", "superposition", "lambert-exact", "coth-interpolation",
                 "semiclassical-log", "elementary-log-approx", "overdamped-bounded", "overdamped-full"})
    models.push_back(*model_from_string(n));
  const auto table = compare_models(kNat, t, models);
  ASSERT_EQ(table.columns.size(), 9u);
  for (const auto& c : table.columns) EXPECT_TRUE(c.error.empty()) << c.label;
  EXPECT_EQ(table.orderings.size(), 5u);
  for (const auto& o : table.orderings) EXPECT_TRUE(o.holds) << o.claim;
  EXPECT_FALSE(model_from_string("no-such-model"));
}

TEST(Compare, FailedModelDoesNotStopOthers) {
  const auto cold = kNat.with_temperature(0.0);
  const auto t = log_space(0.01, 1.0, 5);
  const auto table = compare_models(cold, t, {*model_from_string("einstein"), *model_from_string("pure-quantum")});
  EXPECT_FALSE(table.columns[0].error.empty());
  EXPECT_TRUE(table.columns[1].error.empty());
}
