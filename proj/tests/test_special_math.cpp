#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qbrown/special_math.hpp"

using namespace qbrown;

TEST(LambertW, InvertsWExpW) {
  for (double x : {-0.367, -0.3, -0.1, -1e-3, -1e-10, -1e-100, -1e-300}) {
    const double w = lambert_w_minus1(x);
    EXPECT_LE(w, -1.0);
    EXPECT_NEAR(w * std::exp(w) / x, 1.0, 1e-13) << x;
  }
}

TEST(LambertW, KnownValues) {
  EXPECT_DOUBLE_EQ(lambert_w_minus1(-std::exp(-1.0)), -1.0);
  EXPECT_NEAR(lambert_w_minus1(-0.1), -3.577152063957297, 1e-14);
  EXPECT_NEAR(lambert_w_minus1(-2.0 * std::exp(-2.0)), -2.0, 1e-13);
}

TEST(LambertW, DomainErrors) {
  EXPECT_THROW(lambert_w_minus1(0.0), DomainError);
  EXPECT_THROW(lambert_w_minus1(0.5), DomainError);
  EXPECT_THROW(lambert_w_minus1(-0.5), DomainError);
}

TEST(Coth, SmallAndLargeArguments) {
  EXPECT_NEAR(coth(1e-8) * 1e-8, 1.0, 1e-15);
  EXPECT_NEAR(coth(1e-3), 1.0 / std::tanh(1e-3), 1e-9);
  EXPECT_DOUBLE_EQ(coth(50.0), 1.0);
  EXPECT_DOUBLE_EQ(coth(-2.0), -coth(2.0));
  EXPECT_THROW(coth(0.0), DomainError);
}

TEST(Quadrature, SimpsonIsExactForCubics) {
  auto f = [](double b) { return 1.0 + 2.0 * b - 3.0 * b * b + 4.0 * b * b * b; };
  const double beta = 2.5;
  const double exact = beta + beta * beta - beta * beta * beta + std::pow(beta, 4);
  EXPECT_NEAR(integrate_beta(f, beta, QuadratureRule(5, QuadratureScheme::Simpson)), exact, 1e-12);
  EXPECT_EQ(integrate_beta(f, 0.0, QuadratureRule::standard()), 0.0);
  EXPECT_NEAR(integrate_beta([](double b) { return std::exp(-b); }, 3.0, QuadratureRule(257, QuadratureScheme::Trapezoid)),
              1.0 - std::exp(-3.0), 1.2e-5);
}

TEST(Quadrature, CumulativeIntegralOnUnevenNodes) {
  std::vector<double> x, f;
  for (int i = 0; i <= 60; ++i) {
    const double xi = std::pow(i / 60.0, 2) * 3.0;
    x.push_back(xi);
    f.push_back(std::cos(xi));
  }
  const auto F = cumulative_integral(x, f);
  ASSERT_EQ(F.size(), x.size());
  EXPECT_EQ(F[0], 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(F[i], std::sin(x[i]), 2e-5);
}

TEST(Ode, ExponentialDecayRK45) {
  std::vector<double> t = {0.0, 0.5, 1.0, 5.0};
  const auto traj =
      solve_ode([](double, std::span<const double> y, std::span<double> d) { d[0] = -y[0]; }, {1.0}, t, {});
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(traj.states[i][0], std::exp(-t[i]), 1e-10);
}

TEST(Ode, OscillatorBothMethods) {
  std::vector<double> t;
  for (int i = 0; i <= 20; ++i) t.push_back(0.5 * i);
  auto rhs = [](double, std::span<const double> y, std::span<double> d) {
    d[0] = y[1];
    d[1] = -y[0];
  };
  for (auto method : {OdeMethod::RK45, OdeMethod::RK4}) {
    OdeSolverConfig cfg;
    cfg.method = method;
    cfg.max_step = 1e-3;
    const auto traj = solve_ode(rhs, {1.0, 0.0}, t, cfg);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(traj.states[i][0], std::cos(t[i]), 1e-9);
  }
}

TEST(Ode, RejectsNonMonotoneGrid) {
  auto rhs = [](double, std::span<const double>, std::span<double> d) { d[0] = 0.0; };
  std::vector<double> t = {0.0, 1.0, 0.5};
  EXPECT_THROW(solve_ode(rhs, {0.0}, t, {}), ValidationError);
}

TEST(FixedPoint, CosineFixedPoint) {
  const auto r = fixed_point([](double x) { return std::cos(x); }, 1.0, 0.7, 1e-14, 500);
  EXPECT_NEAR(r.value, 0.7390851332151607, 1e-13);
  EXPECT_FALSE(r.residuals.empty());
  EXPECT_EQ(r.iterations, static_cast<int>(r.residuals.size()));
}

TEST(FixedPoint, NonConvergenceCarriesResiduals) {
  try {
    fixed_point([](double x) { return -2.0 * x + 1.0; }, 0.0, 1.0, 1e-12, 20);
    FAIL() << "diverging map converged";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.residuals().size(), 20u);
  }
}
