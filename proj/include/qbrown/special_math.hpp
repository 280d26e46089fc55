#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbrown/params.hpp"

namespace qbrown {

/// Lower real branch W_{-1} of the inverse of w e^w, for x in (-1/e, 0).
/// Returns w <= -1. Values within 1e-15 of -1/e map to exactly -1.
double lambert_w_minus1(double x);

/// Hyperbolic cotangent, accurate near 0 and for large |x|. Throws at 0.
double coth(double x);

enum class QuadratureScheme { Trapezoid, Simpson };

/// Uniform nodes spanning [0, beta] inclusive.
struct QuadratureRule {
  QuadratureRule(int node_count, QuadratureScheme scheme);

  /// Simpson on 65 nodes.
  static QuadratureRule standard() { return {65, QuadratureScheme::Simpson}; }

  int nodes;
  QuadratureScheme scheme;
};

/// Quadrature of f over [0, beta]. beta = 0 returns exactly 0.
double integrate_beta(const std::function<double(double)>& f, double beta, QuadratureRule rule);

/// Running integral F_i = int_{x_0}^{x_i} f on arbitrary increasing nodes,
/// using the quadratic through each pair of intervals (third order locally).
std::vector<double> cumulative_integral(std::span<const double> nodes,
                                        std::span<const double> values);

// ---------------------------------------------------------------------------
// ODE integration

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

enum class OdeMethod { RK4, RK45 };

struct OdeSolverConfig {
  OdeMethod method = OdeMethod::RK45;
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  double max_step = 1e300;
  std::size_t max_steps = 5'000'000;

  void validate() const;
};

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

/// Integrates y' = rhs(t, y) and reports the state at every grid time.
/// RK4 subdivides each grid interval into equal steps no longer than
/// max_step. RK45 (Dormand-Prince 5(4)) adapts the step and clips it to
/// land on grid times.
OdeTrajectory solve_ode(const OdeRhs& rhs, std::vector<double> y0,
                        std::span<const double> t_grid, const OdeSolverConfig& cfg);

// ---------------------------------------------------------------------------
// Damped fixed-point iteration

class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

private:
  std::vector<double> residuals_;
};

template <class T>
struct FixedPointResult {
  T value;
  int iterations = 0;
  std::vector<double> residuals;
};

namespace detail {

inline double relative_change(double old_v, double new_v) {
  const double scale = std::max(std::abs(new_v), 1e-300);
  return std::abs(new_v - old_v) / scale;
}

inline double relative_change(const std::vector<double>& old_v, const std::vector<double>& new_v) {
  double r = 0.0;
  for (std::size_t i = 0; i < old_v.size(); ++i) r = std::max(r, relative_change(old_v[i], new_v[i]));
  return r;
}

inline double relax(double x, double mapped, double theta) { return (1.0 - theta) * x + theta * mapped; }

inline std::vector<double> relax(const std::vector<double>& x, const std::vector<double>& mapped,
                                 double theta) {
  if (mapped.size() != x.size()) throw ValidationError("fixed-point map changed the iterate shape");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (1.0 - theta) * x[i] + theta * mapped[i];
  return out;
}

inline bool all_finite(double x) { return std::isfinite(x); }
inline bool all_finite(const std::vector<double>& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace detail

/// x_{k+1} = (1 - theta) x_k + theta map(x_k) until the sup-norm relative
/// change drops to tol. Throws ConvergenceError carrying the residual
/// history when max_iter is exhausted or the iterate turns non-finite.
template <class T, class Map>
FixedPointResult<T> fixed_point(Map&& map, T init, double theta, double tol, int max_iter) {
  if (!(theta > 0.0 && theta <= 1.0)) throw ValidationError("relaxation must lie in (0, 1]");
  if (!(tol > 0.0)) throw ValidationError("fixed-point tolerance must be positive");
  FixedPointResult<T> res{std::move(init), 0, {}};
  for (int k = 1; k <= max_iter; ++k) {
    T next = detail::relax(res.value, map(static_cast<const T&>(res.value)), theta);
    if (!detail::all_finite(next))
      throw ConvergenceError("fixed-point iterate became non-finite", res.residuals);
    const double r = detail::relative_change(res.value, next);
    res.residuals.push_back(r);
    res.value = std::move(next);
    res.iterations = k;
    if (r <= tol) return res;
  }
  throw ConvergenceError("fixed-point iteration did not converge in " + std::to_string(max_iter) +
                             " iterations",
                         res.residuals);
}

}  // namespace qbrown
