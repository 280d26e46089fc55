#include "qbrown/special_math.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/lambert_w.hpp>
#include <boost/numeric/odeint.hpp>

namespace qbrown {

// ---------------------------------------------------------------------------
// Lambert W, lower branch

double lambert_w_minus1(double x) {
  constexpr double inv_e = 1.0 / std::numbers::e;
  if (std::isnan(x)) throw DomainError("lambert_w_minus1: NaN argument");
  if (std::abs(x + inv_e) <= 1e-15) return -1.0;
  if (!(x > -inv_e && x < 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "lambert_w_minus1: argument " << x << " outside (-1/e, 0)";
    throw DomainError(os.str());
  }

  return std::min(boost::math::lambert_wm1(x), -1.0);
}

double coth(double x) {
  if (x == 0.0 || std::isnan(x)) throw DomainError("coth: argument must be nonzero");
  const double ax = std::abs(x);
  if (ax < 1e-8) return 1.0 / x + x / 3.0;
  if (ax > 20.0) return x > 0.0 ? 1.0 : -1.0;
  return 1.0 / std::tanh(x);
}

// ---------------------------------------------------------------------------
// Quadrature

QuadratureRule::QuadratureRule(int node_count, QuadratureScheme s) : nodes(node_count), scheme(s) {
  if (nodes < 2) throw ValidationError("quadrature needs at least 2 nodes");
  if (scheme == QuadratureScheme::Simpson && nodes % 2 == 0)
    throw ValidationError("Simpson rule requires an odd node count");
}

double integrate_beta(const std::function<double(double)>& f, double beta, QuadratureRule rule) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("integration bound must be finite and >= 0");
  if (beta == 0.0) return 0.0;
  const int n = rule.nodes;
  const double h = beta / (n - 1);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double b = (i == n - 1) ? beta : i * h;
    const double v = f(b);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "integrand not finite at node " << i << " (beta' = " << b << ")";
      throw NumericalError(os.str());
    }
    double w;
    if (rule.scheme == QuadratureScheme::Trapezoid) {
      w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    } else {
      w = (i == 0 || i == n - 1) ? 1.0 / 3.0 : (i % 2 == 1 ? 4.0 / 3.0 : 2.0 / 3.0);
    }
    sum += w * v;
  }
  return sum * h;
}

namespace {

// Integral over [lo, hi] of the quadratic through three points.
double quadratic_piece(double x0, double x1, double x2, double f0, double f1, double f2, double lo,
                       double hi) {
  const double d1 = (f1 - f0) / (x1 - x0);
  const double d2 = ((f2 - f1) / (x2 - x1) - d1) / (x2 - x0);
  const double a = x1 - x0;
  auto anti = [&](double u) { return u * (f0 + u * (0.5 * d1 + d2 * (u / 3.0 - 0.5 * a))); };
  return anti(hi - x0) - anti(lo - x0);
}

}  // namespace

std::vector<double> cumulative_integral(std::span<const double> x, std::span<const double> f) {
  const std::size_t n = x.size();
  if (f.size() != n) throw ValidationError("cumulative_integral: size mismatch");
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(x[i + 1] > x[i])) throw ValidationError("cumulative_integral: nodes must increase");
  }
  if (n == 2) {
    out[1] = 0.5 * (f[0] + f[1]) * (x[1] - x[0]);
    return out;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double piece = 0.0;
    int count = 0;
    if (i >= 1) {
      piece += quadratic_piece(x[i - 1], x[i], x[i + 1], f[i - 1], f[i], f[i + 1], x[i], x[i + 1]);
      ++count;
    }
    if (i + 2 < n) {
      piece += quadratic_piece(x[i], x[i + 1], x[i + 2], f[i], f[i + 1], f[i + 2], x[i], x[i + 1]);
      ++count;
    }
    out[i + 1] = out[i] + piece / count;
  }
  return out;
}

// ---------------------------------------------------------------------------
// ODE integration

void OdeSolverConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ValidationError("ODE tolerances must be positive");
  if (!(max_step > 0.0)) throw ValidationError("ODE max_step must be positive");
  if (max_steps == 0) throw ValidationError("ODE max_steps must be positive");
}

namespace {

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

[[noreturn]] void fail_at(const std::string& what, double t) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at t = " << t;
  throw NumericalError(os.str());
}

using State = std::vector<double>;
namespace odeint = boost::numeric::odeint;

// Adapts the span-based right-hand side to the odeint system signature.
struct System {
  const OdeRhs& rhs;
  void operator()(const State& y, State& dydt, double t) const { rhs(t, y, dydt); }
};

OdeTrajectory run_dopri5(const OdeRhs& rhs, State y, std::span<const double> grid, const OdeSolverConfig& cfg) {
  auto stepper = odeint::make_controlled(cfg.abs_tol, cfg.rel_tol, cfg.max_step * (1.0 + 1e-9),
                                        odeint::runge_kutta_dopri5<State>());
  const System sys{rhs};
  OdeTrajectory out;
  out.times.assign(grid.begin(), grid.end());
  out.states.reserve(grid.size());
  out.states.push_back(y);
  State dydt(y.size());
  sys(y, dydt, grid.front());
  if (!finite(dydt)) fail_at("right-hand side not finite at initial state", grid.front());

  double t = grid.front();
  double h = std::min({1e-6 * std::max(1.0, std::abs(grid.back() - grid.front())), cfg.max_step,
                       grid.back() - grid.front()});
  State saved;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double target = grid[g];
    while (t < target) {
      if (out.steps + out.rejected >= cfg.max_steps) fail_at("ODE step budget exhausted", t);
      double step = std::min(h, cfg.max_step);
      const bool clipped = t + step >= target || target - (t + step) < 1e-12 * std::abs(target);
      if (clipped) step = target - t;
      saved = y;
      const double t_prev = t;
      const double tried = step;
      if (stepper.try_step(sys, y, t, step) == odeint::success) {
        if (!finite(y)) {
          y = saved;
          t = t_prev;
          stepper.reset();
          ++out.rejected;
          h = 0.25 * tried;
        } else {
          ++out.steps;
          if (clipped) t = target;
          if (!clipped || step > h) h = step;
          continue;
        }
      } else {
        ++out.rejected;
        h = step;
      }
      if (h < 1e-15 * std::max(1.0, std::abs(t))) fail_at("ODE step size underflow", t);
    }
    out.states.push_back(y);
  }
  return out;
}

OdeTrajectory run_rk4(const OdeRhs& rhs, State y, std::span<const double> grid, const OdeSolverConfig& cfg) {
  odeint::runge_kutta4<State> stepper;
  const System sys{rhs};
  OdeTrajectory out;
  out.times.assign(grid.begin(), grid.end());
  out.states.push_back(y);
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double t0 = grid[g - 1];
    const double span = grid[g] - t0;
    const auto sub = static_cast<std::size_t>(std::max(1.0, std::ceil(span / cfg.max_step)));
    const double h = span / static_cast<double>(sub);
    for (std::size_t s = 0; s < sub; ++s) {
      if (out.steps >= cfg.max_steps) fail_at("ODE step budget exhausted", t0 + s * h);
      stepper.do_step(sys, y, t0 + s * h, h);
      if (!finite(y)) fail_at("non-finite state in RK4 step", t0 + s * h);
      ++out.steps;
    }
    out.states.push_back(y);
  }
  return out;
}

}  // namespace

OdeTrajectory solve_ode(const OdeRhs& rhs, std::vector<double> y0, std::span<const double> t_grid,
                        const OdeSolverConfig& cfg) {
  cfg.validate();
  if (t_grid.empty()) throw ValidationError("ODE time grid is empty");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw ValidationError("ODE time grid must be strictly increasing");
  if (!finite(y0)) throw ValidationError("ODE initial state is not finite");
  if (cfg.method == OdeMethod::RK4) return run_rk4(rhs, std::move(y0), t_grid, cfg);
  return run_dopri5(rhs, std::move(y0), t_grid, cfg);
}

}  // namespace qbrown
