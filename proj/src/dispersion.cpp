#include "qbrown/dispersion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qbrown {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<std::pair<ClosedFormKind, std::string_view>, 8> kKindNames{{
    {ClosedFormKind::Einstein, "einstein"},
    {ClosedFormKind::VacuumSpreading, "vacuum-spreading"},
    {ClosedFormKind::PureQuantum, "pure-quantum"},
    {ClosedFormKind::Superposition, "superposition"},
    {ClosedFormKind::LambertExact, "lambert-exact"},
    {ClosedFormKind::CothInterpolation, "coth-interpolation"},
    {ClosedFormKind::SemiclassicalLog, "semiclassical-log"},
    {ClosedFormKind::ElementaryLogApprox, "elementary-log-approx"},
}};

void require_thermal(const PhysicalParams& p, ClosedFormKind kind) {
  if (p.zero_temperature() || p.vacuum())
    throw ConfigError(std::string(to_string(kind)) + " requires T > 0 and b > 0");
}

void require_grid(std::span<const double> t) {
  if (t.empty()) throw ConfigError("time grid is empty");
  if (!(t.front() >= 0.0)) throw ConfigError("time grid must start at t >= 0");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw ConfigError("time grid must be strictly increasing");
}

// y - log(1 + y), accurate for small y.
double excess_over_log1p(double y) {
  if (std::abs(y) < 1e-3) {
    return y * y * (0.5 + y * (-1.0 / 3.0 + y * (0.25 + y * (-0.2 + y / 6.0))));
  }
  return y - std::log1p(y);
}

// Solves y - ln(1 + y) = z for y >= 0.
double bounded_law_root(double z) {
  if (z == 0.0) return 0.0;
  double y;
  if (z < 700.0) {
    y = -1.0 - lambert_w_minus1(-std::exp(-1.0 - z));
  } else {
    y = z + std::log1p(z);
  }
  if (!(y > 0.0)) y = std::sqrt(2.0 * z);
  for (int it = 0; it < 4; ++it) {
    const double g = excess_over_log1p(y) - z;
    const double dg = y / (1.0 + y);
    y -= g / dg;
  }
  return y;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

void validate_beta_grid(std::span<const double> beta_grid, double physical_beta, bool must_end_there) {
  if (beta_grid.size() < 3) throw ConfigError("beta grid needs at least 3 nodes");
  if (beta_grid.front() != 0.0) throw ConfigError("beta grid must start at 0");
  for (std::size_t i = 1; i < beta_grid.size(); ++i)
    if (!(beta_grid[i] > beta_grid[i - 1])) throw ConfigError("beta grid must be strictly increasing");
  if (must_end_there && !near(beta_grid.back(), physical_beta))
    throw ConfigError("beta grid must end at the physical inverse temperature");
  if (!must_end_there &&
      std::none_of(beta_grid.begin(), beta_grid.end(), [&](double b) { return near(b, physical_beta); }))
    throw ConfigError("beta grid must contain the physical inverse temperature");
}

}  // namespace

std::string_view to_string(ClosedFormKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

std::optional<ClosedFormKind> closed_form_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  return std::nullopt;
}

ClosedForm ClosedForm::vacuum_spreading(double sigma0) {
  if (!(sigma0 > 0.0)) throw ValidationError("vacuum spreading needs sigma0 > 0");
  return ClosedForm{ClosedFormKind::VacuumSpreading, sigma0};
}

ClosedFormValue eval_closed_form(const ClosedForm& form, double t, const PhysicalParams& p) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("closed forms need finite t >= 0");
  const double hbar = p.hbar(), m = p.mass(), b = p.friction();
  switch (form.kind) {
    case ClosedFormKind::VacuumSpreading: {
      if (!p.vacuum()) throw ConfigError("vacuum-spreading requires b = 0");
      if (!(form.sigma0 > 0.0)) throw ConfigError("vacuum-spreading requires sigma0 > 0");
      const double spread = hbar * t / (2.0 * m * form.sigma0);
      return {form.sigma0 * form.sigma0 + spread * spread};
    }
    case ClosedFormKind::PureQuantum:
      if (p.vacuum()) throw ConfigError("pure-quantum requires b > 0");
      return {hbar * std::sqrt(t / (m * b))};
    default:
      break;
  }

  require_thermal(p, form.kind);
  const DerivedScales s = derived_scales(p);
  const double lam2 = s.lambda_T * s.lambda_T;
  const double two_dt = 2.0 * s.D * t;
  switch (form.kind) {
    case ClosedFormKind::Einstein:
      return {two_dt};
    case ClosedFormKind::Superposition:
      return {hbar * std::sqrt(t / (m * b)) + two_dt};
    case ClosedFormKind::LambertExact:
      return {lam2 * bounded_law_root(two_dt / lam2)};
    case ClosedFormKind::CothInterpolation: {
      if (t == 0.0) return {0.0};
      const double root = std::sqrt(s.D * t);
      return {2.0 * s.lambda_T * root * coth(s.lambda_T / root)};
    }
    case ClosedFormKind::SemiclassicalLog: {
      const double v = two_dt + lam2 * std::log(two_dt / lam2) / 3.0;
      return {v, two_dt <= lam2};
    }
    case ClosedFormKind::ElementaryLogApprox:
      return {two_dt + 2.0 * lam2 * std::log1p(std::sqrt(s.D * t) / s.lambda_T)};
    default:
      break;
  }
  throw ConfigError("unhandled closed form");
}

void attach_momentum_dispersion(DispersionTrajectory& traj, const PhysicalParams& p) {
  traj.sigma_p2.resize(traj.sigma_x2.size());
  for (std::size_t i = 0; i < traj.sigma_x2.size(); ++i) {
    const double s = traj.sigma_x2[i];
    traj.sigma_p2[i] = s > 0.0 ? momentum_dispersion(s, p) : kInf;
  }
}

DispersionTrajectory closed_form_trajectory(const ClosedForm& form, std::span<const double> times,
                                            const PhysicalParams& p) {
  DispersionTrajectory traj;
  traj.label = std::string(to_string(form.kind));
  traj.times.assign(times.begin(), times.end());
  traj.sigma_x2.reserve(times.size());
  for (double t : times) traj.sigma_x2.push_back(eval_closed_form(form, t, p).sigma_x2);
  if (form.kind == ClosedFormKind::Einstein) {
    // The classical law keeps the equilibrium Maxwell momentum at all times.
    traj.sigma_p2.assign(times.size(), p.mass() * p.thermal_energy());
  } else {
    attach_momentum_dispersion(traj, p);
  }
  return traj;
}

std::optional<std::size_t> first_heisenberg_violation(const DispersionTrajectory& traj,
                                                      const PhysicalParams& p) {
  const double bound = 0.25 * p.hbar() * p.hbar();
  for (std::size_t i = 0; i < traj.sigma_x2.size(); ++i) {
    const double s = traj.sigma_x2[i];
    if (!(s > 0.0)) continue;
    if (s * traj.sigma_p2[i] < bound * (1.0 - 8.0 * std::numeric_limits<double>::epsilon())) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::vector<double> BetaGridFunction::column(std::size_t bj) const {
  std::vector<double> out(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) out[i] = at(i, bj);
  return out;
}

std::size_t BetaGridFunction::index_of_beta(double beta) const {
  for (std::size_t j = 0; j < beta_grid.size(); ++j)
    if (near(beta_grid[j], beta)) return j;
  throw ConfigError("beta not on grid");
}

std::vector<double> log_space(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("log_space needs 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> make_beta_grid(double beta_max, int n, double smallest, std::optional<double> physical_beta) {
  if (!(beta_max > 0.0) || n < 3 || !(smallest > 0.0 && smallest < 1.0))
    throw ConfigError("make_beta_grid: need beta_max > 0, n >= 3, 0 < smallest < 1");
  std::vector<double> grid{0.0};
  const auto rest = log_space(beta_max * smallest, beta_max, n - 1);
  grid.insert(grid.end(), rest.begin(), rest.end());
  if (physical_beta && *physical_beta < beta_max) {
    const double pb = *physical_beta;
    if (!(pb > grid[1])) throw ConfigError("physical beta below the smallest grid node");
    auto it = std::min_element(grid.begin() + 1, grid.end(), [&](double a, double b) {
      return std::abs(std::log(a / pb)) < std::abs(std::log(b / pb));
    });
    *it = pb;
  }
  return grid;
}

// ---------------------------------------------------------------------------

DispersionTrajectory solve_inertial_zero_T(const PhysicalParams& p, const InertialInit& init,
                                           std::span<const double> t_grid, const OdeSolverConfig& cfg) {
  if (!p.zero_temperature()) throw ConfigError("the inertial width equation is the T = 0 model");
  if (!(init.sigma0 > 0.0))
    throw ValidationError("sigma0 must be positive; sigma(0) = 0 is served by the closed forms");
  require_grid(t_grid);
  const double m = p.mass(), b = p.friction(), f = p.force();
  const double quantum = p.hbar() * p.hbar() / (4.0 * m * m);

  OdeRhs rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = (f - b * y[1]) / m;
    const double s = y[2];
    dy[2] = y[3];
    dy[3] = s > 0.0 ? quantum / (s * s * s) - b * y[3] / m : std::numeric_limits<double>::quiet_NaN();
  };
  const auto sol = solve_ode(rhs, {init.mu0, init.mu_dot0, init.sigma0, init.sigma_dot0}, t_grid, cfg);

  DispersionTrajectory traj;
  traj.label = "inertial-zero-T";
  traj.times = sol.times;
  for (std::size_t i = 0; i < sol.states.size(); ++i) {
    const auto& y = sol.states[i];
    if (!(y[2] > 0.0)) {
      std::ostringstream os;
      os << "width reached " << y[2] << " at t = " << sol.times[i] << "; integrator misconfigured";
      throw NumericalError(os.str());
    }
    traj.mu.push_back(y[0]);
    traj.sigma_x2.push_back(y[2] * y[2]);
  }
  attach_momentum_dispersion(traj, p);
  return traj;
}

// ---------------------------------------------------------------------------

double harmonic_equilibrium_dispersion(double beta, const PhysicalParams& p) {
  if (!(p.omega0() > 0.0)) throw ConfigError("harmonic dispersion needs omega0 > 0");
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  const double hw = p.hbar() * p.omega0();
  return p.hbar() / (2.0 * p.mass() * p.omega0()) * coth(0.5 * beta * hw);
}

HarmonicSolution solve_harmonic(const PhysicalParams& p, const HarmonicInit& init,
                                std::span<const double> t_grid, std::span<const double> beta_grid,
                                const OdeSolverConfig& cfg) {
  if (!(p.omega0() > 0.0)) throw ConfigError("harmonic model needs omega0 > 0");
  if (p.zero_temperature()) throw ConfigError("harmonic model needs T > 0");
  if (!(init.sigma2_0 > 0.0)) throw ValidationError("initial dispersion must be positive");
  require_grid(t_grid);
  validate_beta_grid(beta_grid, p.beta(), true);

  const double m = p.mass(), b = p.friction(), w2 = p.omega0() * p.omega0();
  const double h2 = p.hbar() * p.hbar() / (4.0 * m * m);
  const std::size_t nb = beta_grid.size();
  const std::size_t cols = nb - 1;

  std::vector<double> y0(2 + 2 * cols);
  y0[0] = init.mu0;
  y0[1] = init.mu_dot0;
  for (std::size_t j = 0; j < cols; ++j) {
    y0[2 + 2 * j] = init.sigma2_0;
    y0[3 + 2 * j] = init.sigma2_dot0;
  }

  std::vector<double> integrand(nb, 0.0);
  OdeRhs rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = (p.force() - b * y[1]) / m - w2 * y[0];
    integrand[0] = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double s = y[2 + 2 * j];
      integrand[j + 1] = s > 0.0 ? h2 / (s * s) : std::numeric_limits<double>::quiet_NaN();
    }
    const auto acc = cumulative_integral(beta_grid, integrand);
    for (std::size_t j = 0; j < cols; ++j) {
      const double beta = beta_grid[j + 1];
      const double s = y[2 + 2 * j];
      const double v = y[3 + 2 * j];
      dy[2 + 2 * j] = v;
      dy[3 + 2 * j] = (2.0 / beta - b * v) / m - 2.0 * (w2 - acc[j + 1] / beta) * s;
    }
  };
  const auto sol = solve_ode(rhs, y0, t_grid, cfg);

  HarmonicSolution out;
  out.surface.t_grid = sol.times;
  out.surface.beta_grid.assign(beta_grid.begin(), beta_grid.end());
  out.surface.values.resize(sol.times.size() * nb);
  auto& traj = out.trajectory;
  traj.label = "harmonic";
  traj.times = sol.times;
  for (std::size_t i = 0; i < sol.states.size(); ++i) {
    const auto& y = sol.states[i];
    out.surface.values[i * nb] = kInf;
    for (std::size_t j = 0; j < cols; ++j) {
      if (!(y[2 + 2 * j] > 0.0)) throw NumericalError("harmonic dispersion became non-positive");
      out.surface.values[i * nb + j + 1] = y[2 + 2 * j];
    }
    traj.mu.push_back(y[0]);
    traj.sigma_x2.push_back(y[2 + 2 * (cols - 1)]);
  }
  attach_momentum_dispersion(traj, p);
  return out;
}

StationaryHarmonicResult stationary_harmonic_dispersion(double beta, const PhysicalParams& p, double tol,
                                                        double theta, int max_iter) {
  if (!(p.omega0() > 0.0)) throw ConfigError("harmonic model needs omega0 > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive and finite");
  const double m = p.mass(), w2 = p.omega0() * p.omega0();
  const double h2 = p.hbar() * p.hbar() / (4.0 * m * m);
  const double hbar2 = p.hbar() * p.hbar();

  // Windows short enough that one sweep contracts by about 1/4 in the
  // inverse-width variable, whatever the starting profile.
  const double u_max = std::max(beta * w2, 2.0 * p.omega0() / p.hbar());
  const double window = 0.25 / (0.5 * hbar2 * u_max);
  const int n_windows = std::max(1, static_cast<int>(std::ceil(beta / window)));
  constexpr int kIntervals = 16;

  StationaryHarmonicResult res;
  res.windows = n_windows;
  res.beta_nodes.reserve(n_windows * kIntervals + 1);
  res.beta_nodes.push_back(0.0);
  res.profile.push_back(kInf);
  double accumulated = 0.0;  // int_0^{window start} hbar^2 / (4 m^2 sigma^4)

  for (int w = 0; w < n_windows; ++w) {
    const double b0 = beta * w / n_windows;
    const double b1 = (w == n_windows - 1) ? beta : beta * (w + 1) / n_windows;
    std::vector<double> nodes(kIntervals + 1);
    for (int k = 0; k <= kIntervals; ++k) nodes[k] = b0 + (b1 - b0) * k / kIntervals;
    nodes.back() = b1;
    const double start_integrand = (w == 0) ? 0.0 : h2 / (res.profile.back() * res.profile.back());

    std::vector<double> guess(kIntervals);
    // Classical profile in the first window, continuation afterwards.
    for (int k = 0; k < kIntervals; ++k) guess[k] = w == 0 ? 1.0 / (nodes[k + 1] * m * w2) : res.profile.back();

    std::vector<double> integrand(kIntervals + 1);
    auto sweep = [&](const std::vector<double>& s) {
      integrand[0] = start_integrand;
      for (int k = 0; k < kIntervals; ++k) integrand[k + 1] = h2 / (s[k] * s[k]);
      const auto acc = cumulative_integral(nodes, integrand);
      std::vector<double> next(kIntervals);
      for (int k = 0; k < kIntervals; ++k) {
        const double bk = nodes[k + 1];
        const double spring = w2 - (accumulated + acc[k + 1]) / bk;
        next[k] = spring > 0.0 ? (1.0 / bk) / (m * spring) : std::numeric_limits<double>::quiet_NaN();
      }
      return next;
    };

    FixedPointResult<std::vector<double>> fp;
    try {
      fp = fixed_point(sweep, guess, theta, tol, max_iter);
    } catch (const ConvergenceError& e) {
      auto hist = res.residuals;
      hist.insert(hist.end(), e.residuals().begin(), e.residuals().end());
      throw ConvergenceError(std::string("stationary harmonic profile: ") + e.what(), std::move(hist));
    }
    res.iterations += fp.iterations;
    res.residuals.insert(res.residuals.end(), fp.residuals.begin(), fp.residuals.end());

    integrand[0] = start_integrand;
    for (int k = 0; k < kIntervals; ++k) integrand[k + 1] = h2 / (fp.value[k] * fp.value[k]);
    accumulated += cumulative_integral(nodes, integrand).back();
    for (int k = 0; k < kIntervals; ++k) {
      res.beta_nodes.push_back(nodes[k + 1]);
      res.profile.push_back(fp.value[k]);
    }
  }
  res.sigma_x2 = res.profile.back();
  return res;
}

// ---------------------------------------------------------------------------

DispersionTrajectory solve_overdamped_bounded(const PhysicalParams& p, double sigma2_0,
                                              std::span<const double> t_grid, const OdeSolverConfig& cfg) {
  if (p.zero_temperature() || p.vacuum()) throw ConfigError("overdamped-bounded requires T > 0 and b > 0");
  if (!(sigma2_0 >= 0.0)) throw ValidationError("initial dispersion must be >= 0");
  require_grid(t_grid);
  const DerivedScales s = derived_scales(p);
  const double lam2 = s.lambda_T * s.lambda_T;

  DispersionTrajectory traj;
  traj.label = "overdamped-bounded";
  traj.times.assign(t_grid.begin(), t_grid.end());
  traj.sigma_x2.assign(t_grid.size(), 0.0);

  std::vector<double> grid;
  std::size_t first_out = 0;  // index in t_grid of grid[0] (or of grid[1] when 0 was prepended)
  double y0;
  bool prepended = false;
  if (sigma2_0 == 0.0) {
    while (first_out < t_grid.size() && t_grid[first_out] == 0.0) ++first_out;
    if (first_out == t_grid.size()) {
      attach_momentum_dispersion(traj, p);
      return traj;
    }
    grid.assign(t_grid.begin() + first_out, t_grid.end());
    y0 = eval_closed_form(ClosedFormKind::LambertExact, grid.front(), p).sigma_x2;
  } else {
    if (t_grid.front() > 0.0) {
      grid.push_back(0.0);
      prepended = true;
    }
    grid.insert(grid.end(), t_grid.begin(), t_grid.end());
    y0 = sigma2_0;
  }

  OdeRhs rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[0] > 0.0 ? 2.0 * s.D * (1.0 + lam2 / y[0]) : std::numeric_limits<double>::quiet_NaN();
  };
  const auto sol = solve_ode(rhs, {y0}, grid, cfg);
  const std::size_t skip = prepended ? 1 : 0;
  for (std::size_t i = skip; i < sol.states.size(); ++i) traj.sigma_x2[first_out + i - skip] = sol.states[i][0];
  attach_momentum_dispersion(traj, p);
  return traj;
}

OverdampedFullResult solve_overdamped_full(const PhysicalParams& p, std::span<const double> t_grid,
                                           std::span<const double> beta_grid, const OverdampedFullConfig& cfg) {
  if (p.zero_temperature() || p.vacuum()) throw ConfigError("overdamped-full requires T > 0 and b > 0");
  require_grid(t_grid);
  if (t_grid.front() != 0.0 || t_grid.size() < 2) throw ConfigError("overdamped-full time grid must start at 0");
  validate_beta_grid(beta_grid, p.beta(), false);
  if (cfg.nodes_per_efold < 2 || !(cfg.window_efolds > 0.0) || !(cfg.start_fraction > 0.0 && cfg.start_fraction <= 1.0))
    throw ConfigError("overdamped-full: invalid discretisation settings");

  const double hbar = p.hbar(), m = p.mass(), b = p.friction();
  const double q = hbar * hbar / (4.0 * m);
  const std::size_t nb = beta_grid.size();
  const std::size_t cols = nb - 1;

  // Internal log-spaced time nodes merged with the requested output times.
  const double t_first = t_grid[1];
  const double t_start = t_first * cfg.start_fraction;
  const double t_end = t_grid.back();
  std::vector<double> times;
  if (t_end > t_start) {
    const int n = std::max(2, static_cast<int>(std::ceil(std::log(t_end / t_start) * cfg.nodes_per_efold)) + 1);
    times = log_space(t_start, t_end, n);
  } else {
    times = {t_start};
  }
  times.insert(times.end(), t_grid.begin() + 1, t_grid.end());
  std::sort(times.begin(), times.end());
  {
    std::vector<double> merged;
    for (double t : times) {
      if (!merged.empty() && std::abs(t - merged.back()) <= 1e-10 * t) {
        // Keep requested output times verbatim.
        if (std::binary_search(t_grid.begin(), t_grid.end(), t)) merged.back() = t;
        continue;
      }
      merged.push_back(t);
    }
    times.swap(merged);
  }
  const std::size_t nt = times.size();

  std::vector<double> diff(cols);
  for (std::size_t j = 0; j < cols; ++j) diff[j] = 1.0 / (beta_grid[j + 1] * b);
  auto superposition = [&](double t, std::size_t j) { return hbar * std::sqrt(t / (m * b)) + 2.0 * diff[j] * t; };

  std::vector<double> surface(nt * cols);
  for (std::size_t j = 0; j < cols; ++j) surface[j] = superposition(times[0], j);

  OverdampedFullResult res;
  std::vector<double> integrand(nb, 0.0);

  std::size_t a = 0;
  while (a + 1 < nt) {
    std::size_t e = a + 1;
    while (e + 1 < nt && std::log(times[e + 1] / times[a]) <= cfg.window_efolds) ++e;
    const std::size_t len = e - a;  // unknown time rows in this window

    std::vector<double> guess(len * cols);
    for (std::size_t r = 0; r < len; ++r)
      for (std::size_t j = 0; j < cols; ++j) guess[r * cols + j] = superposition(times[a + 1 + r], j);

    auto value = [&](const std::vector<double>& x, std::size_t row, std::size_t j) {
      return row == 0 ? surface[a * cols + j] : x[(row - 1) * cols + j];
    };

    std::vector<double> quantum((len + 1) * cols);
    auto sweep = [&](const std::vector<double>& x) {
      for (std::size_t row = 0; row <= len; ++row) {
        integrand[0] = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
          const double s = value(x, row, j);
          integrand[j + 1] = q / (s * s);
        }
        const auto acc = cumulative_integral(beta_grid, integrand);
        for (std::size_t j = 0; j < cols; ++j) quantum[row * cols + j] = acc[j + 1];
      }
      std::vector<double> next(len * cols);
      for (std::size_t j = 0; j < cols; ++j) {
        const double d = diff[j];
        double s = surface[a * cols + j];
        for (std::size_t row = 0; row < len; ++row) {
          const double h = times[a + row + 1] - times[a + row];
          const double a0 = quantum[row * cols + j];
          const double a1 = quantum[(row + 1) * cols + j];
          double s_next;
          if (cfg.outer == OuterDispersion::Unknown) {
            const double denom = 1.0 - h * d * a1;
            if (!(denom > 0.0)) throw NumericalError("overdamped-full: time step too long for the quantum term");
            s_next = (s + h * d * (1.0 + s * a0) + h * d) / denom;
          } else {
            const double s0 = value(x, row, j);
            const double s1 = value(x, row + 1, j);
            s_next = s + h * d * ((1.0 + s0 * a0) + (1.0 + s1 * a1));
          }
          if (!(s_next > 0.0)) throw NumericalError("overdamped-full: negative dispersion; grids too coarse");
          next[row * cols + j] = s_next;
          s = s_next;
        }
      }
      return next;
    };

    FixedPointResult<std::vector<double>> fp;
    try {
      fp = fixed_point(sweep, guess, cfg.theta, cfg.tol, cfg.max_iter);
    } catch (const ConvergenceError& err) {
      auto hist = res.residuals;
      hist.insert(hist.end(), err.residuals().begin(), err.residuals().end());
      std::ostringstream os;
      os.precision(6);
      os << "overdamped-full: Picard window starting at t = " << times[a] << ": " << err.what();
      throw ConvergenceError(os.str(), std::move(hist));
    }
    ++res.windows;
    res.sweeps += fp.iterations;
    res.residuals.insert(res.residuals.end(), fp.residuals.begin(), fp.residuals.end());
    std::copy(fp.value.begin(), fp.value.end(), surface.begin() + (a + 1) * cols);
    a = e;
  }

  auto& out = res.surface;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  out.beta_grid.assign(beta_grid.begin(), beta_grid.end());
  out.values.assign(t_grid.size() * nb, 0.0);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const auto it = std::lower_bound(times.begin(), times.end(), t_grid[i]);
    const auto row = static_cast<std::size_t>(it - times.begin());
    out.values[i * nb] = kInf;
    for (std::size_t j = 0; j < cols; ++j) out.values[i * nb + j + 1] = surface[row * cols + j];
  }

  const std::size_t jp = out.index_of_beta(p.beta());
  auto& traj = res.trajectory;
  traj.label = "overdamped-full";
  traj.times = out.t_grid;
  traj.sigma_x2 = out.column(jp);
  attach_momentum_dispersion(traj, p);
  return res;
}

// ---------------------------------------------------------------------------

std::string ModelSpec::label() const {
  if (closed_form) return std::string(to_string(closed_form->kind));
  return *solved == SolvedModel::OverdampedBounded ? "overdamped-bounded" : "overdamped-full";
}

std::optional<ModelSpec> model_from_string(std::string_view name) {
  if (auto k = closed_form_from_string(name)) return ModelSpec::of(*k);
  if (name == "overdamped-bounded") return ModelSpec::of(SolvedModel::OverdampedBounded);
  if (name == "overdamped-full") return ModelSpec::of(SolvedModel::OverdampedFull);
  return std::nullopt;
}

namespace {

std::vector<double> run_model(const ModelSpec& spec, const PhysicalParams& p, std::span<const double> t_grid,
                              const OverdampedFullConfig& full_cfg, int beta_nodes) {
  if (spec.closed_form) {
    std::vector<double> v;
    for (double t : t_grid) v.push_back(eval_closed_form(*spec.closed_form, t, p).sigma_x2);
    return v;
  }
  std::vector<double> grid(t_grid.begin(), t_grid.end());
  const bool prepend = grid.front() > 0.0;
  if (prepend) grid.insert(grid.begin(), 0.0);
  std::vector<double> v;
  if (*spec.solved == SolvedModel::OverdampedBounded) {
    v = solve_overdamped_bounded(p, 0.0, grid).sigma_x2;
  } else {
    if (p.zero_temperature() || p.vacuum()) throw ConfigError("overdamped-full requires T > 0 and b > 0");
    const auto betas = make_beta_grid(p.beta(), beta_nodes);
    v = solve_overdamped_full(p, grid, betas, full_cfg).trajectory.sigma_x2;
  }
  if (prepend) v.erase(v.begin());
  return v;
}

}  // namespace

ComparisonTable compare_models(const PhysicalParams& p, std::span<const double> t_grid,
                               const std::vector<ModelSpec>& models, const OverdampedFullConfig& full_cfg,
                               int beta_nodes) {
  ComparisonTable table;
  table.times.assign(t_grid.begin(), t_grid.end());
  if (models.empty()) return table;
  require_grid(t_grid);

  for (const auto& spec : models) {
    ComparisonColumn col;
    col.label = spec.label();
    try {
      col.sigma_x2 = run_model(spec, p, t_grid, full_cfg, beta_nodes);
    } catch (const Error& e) {
      col.error = e.what();
    }
    table.columns.push_back(std::move(col));
  }

  const std::size_t n = table.columns.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  table.max_relative_deviation.assign(n, std::vector<double>(n, nan));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto& a = table.columns[i].sigma_x2;
      const auto& c = table.columns[k].sigma_x2;
      if (a.empty() || c.empty()) continue;
      double worst = 0.0;
      for (std::size_t t = 0; t < a.size(); ++t) {
        const double scale = std::max(std::abs(a[t]), std::abs(c[t]));
        if (scale > 0.0 && std::isfinite(scale)) worst = std::max(worst, std::abs(a[t] - c[t]) / scale);
      }
      table.max_relative_deviation[i][k] = worst;
    }
  }

  auto find = [&](std::string_view label) -> const std::vector<double>* {
    for (const auto& c : table.columns)
      if (c.label == label && !c.sigma_x2.empty()) return &c.sigma_x2;
    return nullptr;
  };
  auto order = [&](std::string_view upper, std::string_view lower, double slack) {
    const auto* u = find(upper);
    const auto* l = find(lower);
    if (!u || !l) return;
    OrderingVerdict v{std::string(lower) + " <= " + std::string(upper), true, kInf};
    for (std::size_t t = 0; t < u->size(); ++t) {
      const double hi = (*u)[t], lo = (*l)[t];
      if (!(hi > 0.0)) continue;
      v.worst_margin = std::min(v.worst_margin, (hi - lo) / hi);
      if (lo > hi * (1.0 + slack)) v.holds = false;
    }
    table.orderings.push_back(std::move(v));
  };
  constexpr double kExact = 1e-14;
  constexpr double kQuadrature = 1e-6;
  order("superposition", "lambert-exact", kExact);
  order("superposition", "overdamped-bounded", 1e-8);
  order("lambert-exact", "overdamped-full", kQuadrature);
  order("overdamped-bounded", "overdamped-full", kQuadrature);
  order("elementary-log-approx", "semiclassical-log", kExact);
  return table;
}

}  // namespace qbrown
