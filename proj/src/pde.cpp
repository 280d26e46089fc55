#include "qbrown/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qbrown {

Grid1D::Grid1D(double x_min, double x_max, int n) : x_min_(x_min), x_max_(x_max), n_(n) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max))
    throw ValidationError("grid needs finite x_min < x_max");
  if (n < 16) throw ValidationError("grid needs at least 16 nodes");
  h_ = (x_max - x_min) / (n - 1);
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> out(n_);
  for (int i = 0; i < n_; ++i) out[i] = x(i);
  return out;
}

double DensityField::mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += rho[i];
  s -= 0.5 * (rho.front() + rho.back());
  return s * grid.h();
}

void DensityField::normalize() {
  const double m = mass();
  if (!(m > 0.0) || !std::isfinite(m)) throw NumericalError("cannot normalize a density with mass " + std::to_string(m));
  for (double& r : rho) r /= m;
}

DensityField DensityField::gaussian(const Grid1D& grid, double mean, double sigma2) {
  if (!(sigma2 > 0.0)) throw ValidationError("gaussian needs a positive dispersion");
  DensityField f{grid, std::vector<double>(grid.n())};
  for (int i = 0; i < grid.n(); ++i) {
    const double d = grid.x(i) - mean;
    f.rho[i] = std::exp(-d * d / (2.0 * sigma2));
  }
  f.normalize();
  return f;
}

DensityField DensityField::uniform(const Grid1D& grid) {
  DensityField f{grid, std::vector<double>(grid.n(), 1.0)};
  f.normalize();
  return f;
}

Moments moments(const DensityField& f) {
  const auto& g = f.grid;
  double m0 = 0.0, m1 = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    const double w = (i == 0 || i == g.n() - 1) ? 0.5 : 1.0;
    const double x = g.x(i);
    m0 += w * f.rho[i];
    m1 += w * f.rho[i] * x;
  }
  m0 *= g.h();
  m1 *= g.h();
  Moments out{m1 / m0, 0.0, m0, std::nullopt};
  // Central second moment, shifted for accuracy.
  double c2 = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    const double w = (i == 0 || i == g.n() - 1) ? 0.5 : 1.0;
    const double d = g.x(i) - out.mean;
    c2 += w * f.rho[i] * d * d;
  }
  out.dispersion = c2 * g.h() / m0;
  if (std::abs(m0 - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "density norm " << m0 << " deviates from 1";
    out.warning = os.str();
  }
  return out;
}

// ---------------------------------------------------------------------------

PotentialSpec PotentialSpec::linear(double f) {
  if (!std::isfinite(f)) throw ValidationError("force must be finite");
  PotentialSpec s(Kind::Linear);
  s.a_ = f;
  return s;
}

PotentialSpec PotentialSpec::harmonic(double omega0) {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ValidationError("harmonic potential needs omega0 > 0");
  PotentialSpec s(Kind::Harmonic);
  s.a_ = omega0;
  return s;
}

PotentialSpec PotentialSpec::quartic(double k4) {
  if (!(k4 > 0.0) || !std::isfinite(k4)) throw ValidationError("quartic potential needs k4 > 0");
  PotentialSpec s(Kind::Quartic);
  s.a_ = k4;
  return s;
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> values) {
  for (double v : values)
    if (!std::isfinite(v)) throw ValidationError("tabulated potential values must be finite");
  PotentialSpec s(Kind::Tabulated);
  s.table_ = std::move(values);
  return s;
}

void PotentialSpec::check_consistency(const PhysicalParams& p, const Grid1D& grid) const {
  auto differs = [](double a, double b) { return std::abs(a - b) > 1e-12 * std::max(std::abs(a), std::abs(b)); };
  if (kind_ == Kind::Harmonic && p.omega0() > 0.0 && differs(a_, p.omega0()))
    throw ConfigError("harmonic potential frequency differs from params omega0");
  if (kind_ == Kind::Linear && p.force() != 0.0 && differs(a_, p.force()))
    throw ConfigError("linear potential force differs from params force");
  if (kind_ == Kind::Tabulated && static_cast<int>(table_.size()) != grid.n())
    throw ConfigError("tabulated potential has " + std::to_string(table_.size()) + " values for " +
                      std::to_string(grid.n()) + " grid nodes");
}

std::string_view to_string(PotentialSpec::Kind kind) {
  switch (kind) {
    case PotentialSpec::Kind::Free: return "free";
    case PotentialSpec::Kind::Linear: return "linear";
    case PotentialSpec::Kind::Harmonic: return "harmonic";
    case PotentialSpec::Kind::Quartic: return "quartic";
    case PotentialSpec::Kind::Tabulated: return "tabulated";
  }
  return "unknown";
}

namespace {

// First and second derivatives of nodal values; second order everywhere.
void differentiate(const std::vector<double>& v, double h, std::vector<double>& d1, std::vector<double>& d2) {
  const std::size_t n = v.size();
  d1.assign(n, 0.0);
  d2.assign(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d1[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    d2[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
  }
  d1[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d1[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  d2[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h);
  d2[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / (h * h);
}

}  // namespace

PotentialSamples sample_potential(const PotentialSpec& U, const PhysicalParams& p, const Grid1D& grid) {
  U.check_consistency(p, grid);
  const int n = grid.n();
  PotentialSamples s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const double m = p.mass();
  for (int i = 0; i < n; ++i) {
    const double x = grid.x(i);
    switch (U.kind()) {
      case PotentialSpec::Kind::Free:
      case PotentialSpec::Kind::Tabulated:
        break;
      case PotentialSpec::Kind::Linear:
        s.U[i] = -U.force() * x;
        s.dU[i] = -U.force();
        break;
      case PotentialSpec::Kind::Harmonic: {
        const double k = m * U.omega0() * U.omega0();
        s.U[i] = 0.5 * k * x * x;
        s.dU[i] = k * x;
        s.d2U[i] = k;
        break;
      }
      case PotentialSpec::Kind::Quartic:
        s.U[i] = U.k4() * x * x * x * x;
        s.dU[i] = 4.0 * U.k4() * x * x * x;
        s.d2U[i] = 12.0 * U.k4() * x * x;
        break;
    }
  }
  if (U.kind() == PotentialSpec::Kind::Tabulated) {
    s.U = U.table();
    differentiate(s.U, grid.h(), s.dU, s.d2U);
  }
  return s;
}

QuantumPotential quantum_potential(const DensityField& rho, const PhysicalParams& p, double floor_fraction,
                                   bool periodic) {
  const int n = rho.grid.n();
  const double h = rho.grid.h();
  const double peak = *std::max_element(rho.rho.begin(), rho.rho.end());
  QuantumPotential out{std::vector<double>(n, 0.0), 0.0, floor_fraction * peak};
  std::vector<double> psi(n);
  int floored = 0;
  for (int i = 0; i < n; ++i) {
    if (rho.rho[i] < out.floor) ++floored;
    psi[i] = std::sqrt(std::max(rho.rho[i], out.floor));
  }
  out.floored_fraction = static_cast<double>(floored) / n;
  if (!(out.floor > 0.0)) throw NumericalError("quantum potential of a density with no positive values");

  const double c = -p.hbar() * p.hbar() / (2.0 * p.mass() * h * h);
  for (int i = 1; i + 1 < n; ++i) out.Q[i] = c * (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) / psi[i];
  if (periodic) {
    // Node n-1 is the image of node 0.
    out.Q[0] = c * (psi[1] - 2.0 * psi[0] + psi[n - 2]) / psi[0];
    out.Q[n - 1] = out.Q[0];
  } else {
    out.Q[0] = c * (2.0 * psi[0] - 5.0 * psi[1] + 4.0 * psi[2] - psi[3]) / psi[0];
    out.Q[n - 1] = c * (2.0 * psi[n - 1] - 5.0 * psi[n - 2] + 4.0 * psi[n - 3] - psi[n - 4]) / psi[n - 1];
  }
  return out;
}

std::vector<double> effective_potential(const PotentialSpec& U, double beta, const PhysicalParams& p,
                                        const Grid1D& grid) {
  if (!(beta > 0.0)) throw DomainError("effective potential needs beta > 0");
  const auto s = sample_potential(U, p, grid);
  const double c = beta * p.hbar() * p.hbar() / (24.0 * p.mass());
  std::vector<double> out(grid.n());
  for (int i = 0; i < grid.n(); ++i) out[i] = s.U[i] + c * (3.0 * s.d2U[i] - beta * s.dU[i] * s.dU[i]);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::pair<PdeModel, std::string_view> kModelNames[] = {
    {PdeModel::ClassicalTelegraph, "classical-telegraph"},
    {PdeModel::ClassicalSmoluchowski, "classical-smoluchowski"},
    {PdeModel::SemiclassicalTelegraph, "semiclassical-telegraph"},
    {PdeModel::SemiclassicalSmoluchowski, "semiclassical-smoluchowski"},
    {PdeModel::QuantumZeroT_Telegraph, "quantum-zero-T-telegraph"},
    {PdeModel::QuantumZeroT_Smoluchowski, "quantum-zero-T-smoluchowski"},
};

bool is_quantum(PdeModel m) {
  return m == PdeModel::QuantumZeroT_Telegraph || m == PdeModel::QuantumZeroT_Smoluchowski;
}

bool is_semiclassical(PdeModel m) {
  return m == PdeModel::SemiclassicalTelegraph || m == PdeModel::SemiclassicalSmoluchowski;
}

// Static part of the drift potential and the extra diffusion coefficient
// of the position-dependent assembly.
struct StaticDrift {
  std::vector<double> phi;
  std::vector<double> curvature;  ///< U'' (only used by the alternative flux)
  double extra_diffusion = 0.0;   ///< beta hbar^2 / 12 m, alternative flux only
};

StaticDrift static_drift(PdeModel model, const PotentialSpec& U, const PhysicalParams& p, const Grid1D& grid,
                         bool ankerhold) {
  StaticDrift d;
  const auto s = sample_potential(U, p, grid);
  if (!is_semiclassical(model)) {
    d.phi = s.U;
    return d;
  }
  const double beta = p.beta();
  if (ankerhold) {
    const double c = beta * p.hbar() * p.hbar() / (24.0 * p.mass());
    d.phi.resize(grid.n());
    for (int i = 0; i < grid.n(); ++i) d.phi[i] = s.U[i] + c * s.d2U[i];
    d.curvature = s.d2U;
    d.extra_diffusion = 2.0 * c;
  } else {
    d.phi = effective_potential(U, beta, p, grid);
  }
  return d;
}

void check_model(PdeModel model, const PhysicalParams& p) {
  if (is_quantum(model) && !p.zero_temperature())
    throw ConfigError(std::string(to_string(model)) + " requires T = 0");
  if (!is_quantum(model) && p.zero_temperature())
    throw ConfigError(std::string(to_string(model)) + " requires T > 0");
  if (!is_telegraph(model) && p.vacuum())
    throw ConfigError(std::string(to_string(model)) + " requires b > 0");
}

double operator_bound(PdeModel model, const StaticDrift& d, const PhysicalParams& p, const Grid1D& grid) {
  const double h = grid.h();
  double slope = 0.0, curv = 0.0, umax = 0.0;
  for (int i = 0; i + 1 < grid.n(); ++i) slope = std::max(slope, std::abs(d.phi[i + 1] - d.phi[i]) / h);
  for (int i = 1; i + 1 < grid.n(); ++i)
    curv = std::max(curv, std::abs(d.phi[i + 1] - 2.0 * d.phi[i] + d.phi[i - 1]) / (h * h));
  for (double c : d.curvature) umax = std::max(umax, std::abs(c));
  double lam = 4.0 * (p.thermal_energy() + d.extra_diffusion * umax) / (h * h) + 2.0 * slope / h + curv;
  if (is_quantum(model)) lam += 4.0 * p.hbar() * p.hbar() / (p.mass() * h * h * h * h);
  return lam;
}

double step_bound(PdeModel model, double lam, const PhysicalParams& p) {
  if (!(lam > 0.0)) return std::numeric_limits<double>::infinity();
  const double b = p.friction(), m = p.mass();
  // Leapfrog with centred damping is stable for dt^2 lam / m < 4 at any b.
  if (is_telegraph(model)) return 2.0 * std::sqrt(m / lam);
  return 2.0 * b / lam;
}

}  // namespace

std::string_view to_string(PdeModel model) {
  for (const auto& [k, n] : kModelNames)
    if (k == model) return n;
  return "unknown";
}

std::optional<PdeModel> pde_model_from_string(std::string_view name) {
  for (const auto& [k, n] : kModelNames)
    if (n == name) return k;
  return std::nullopt;
}

bool is_telegraph(PdeModel m) {
  return m == PdeModel::ClassicalTelegraph || m == PdeModel::SemiclassicalTelegraph ||
         m == PdeModel::QuantumZeroT_Telegraph;
}

double stable_dt(PdeModel model, const PotentialSpec& U, const PhysicalParams& p, const Grid1D& grid) {
  check_model(model, p);
  const auto d = static_drift(model, U, p, grid, false);
  return step_bound(model, operator_bound(model, d, p, grid), p);
}

EvolveResult evolve(const DensityField& rho0, PdeModel model, const PotentialSpec& U, const PhysicalParams& p,
                    const EvolveConfig& cfg) {
  check_model(model, p);
  if (!(cfg.t_final > 0.0) || !std::isfinite(cfg.t_final)) throw ConfigError("t_final must be positive");
  if (cfg.ankerhold_flux && !is_semiclassical(model))
    throw ConfigError("the alternative flux assembly applies to the semiclassical models only");
  const Grid1D& grid = rho0.grid;
  const int n = grid.n();
  const double h = grid.h();
  const bool periodic = cfg.boundary == Boundary::Periodic;
  for (double r : rho0.rho)
    if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("initial density must be finite and non-negative");

  const StaticDrift drift = static_drift(model, U, p, grid, cfg.ankerhold_flux);
  if (periodic) {
    const double scale = 1.0 + *std::max_element(drift.phi.begin(), drift.phi.end(), [](double a, double b) {
      return std::abs(a) < std::abs(b);
    });
    if (std::abs(drift.phi.front() - drift.phi.back()) > 1e-12 * std::abs(scale))
      throw ConfigError("periodic boundaries need a potential with equal end values");
  }

  const double bound = step_bound(model, operator_bound(model, drift, p, grid), p);
  double dt = cfg.dt;
  if (dt <= 0.0) {
    dt = 0.9 * bound;
  } else if (dt > bound * (1.0 + 1e-12)) {
    std::ostringstream os;
    os.precision(6);
    os << "dt = " << dt << " exceeds the stability bound " << bound << " for " << to_string(model);
    throw ConfigError(os.str());
  }
  const long n_steps = std::max(1L, static_cast<long>(std::ceil(cfg.t_final / dt - 1e-9)));
  dt = cfg.t_final / n_steps;
  const long stride = std::max(1L, n_steps / std::max(1, cfg.records));

  const double kT = is_quantum(model) ? 0.0 : p.thermal_energy();
  const double b = p.friction(), m = p.mass();
  const bool quantum = is_quantum(model);
  const bool telegraph = is_telegraph(model);

  // Control volumes: half cells at reflecting ends; node n-1 mirrors node 0
  // when periodic.
  std::vector<double> inv_w(n, 1.0 / h);
  if (!periodic) inv_w[0] = inv_w[n - 1] = 2.0 / h;

  EvolveResult res{rho0, {}, n_steps, dt, 0.0, 0.0};
  auto& rho = res.final_density.rho;
  if (periodic) rho[n - 1] = rho[0];
  const double mass0 = res.final_density.mass();
  std::vector<double> v(n, 0.0), phi = drift.phi, flux(n, 0.0), rate(n, 0.0);

  auto record = [&](double t) {
    const auto mo = moments(res.final_density);
    res.moments.push_back({t, mo.mean, mo.dispersion, mo.norm});
  };
  record(0.0);

  double tail = 0.0;
  for (long k = 1; k <= n_steps; ++k) {
    if (quantum) {
      const auto q = quantum_potential(res.final_density, p, cfg.floor_fraction, periodic);
      res.max_floored_fraction = std::max(res.max_floored_fraction, q.floored_fraction);
      for (int i = 0; i < n; ++i) phi[i] = drift.phi[i] + q.Q[i];
      tail = q.floor;
    }
    // flux[i] sits between nodes i and i+1.
    for (int i = 0; i < n - 1; ++i) {
      const int j = (periodic && i == n - 2) ? 0 : i + 1;
      double avg = 0.5 * (rho[i] + rho[j]);
      if (quantum && std::min(rho[i], rho[j]) < tail) {
        // Upwind in the floored tail, where central weights turn anti-diffusive.
        avg = std::max(phi[j] > phi[i] ? rho[j] : rho[i], 0.0);
      }
      double f = avg * (phi[j] - phi[i]) / h + kT * (rho[j] - rho[i]) / h;
      if (drift.extra_diffusion != 0.0)
        f += drift.extra_diffusion * (rho[j] * drift.curvature[j] - rho[i] * drift.curvature[i]) / h;
      flux[i] = f;
    }
    if (periodic) {
      for (int i = 0; i < n - 1; ++i) {
        const int left = i == 0 ? n - 2 : i - 1;
        rate[i] = (flux[i] - flux[left]) * inv_w[i];
      }
      rate[n - 1] = rate[0];
    } else {
      rate[0] = flux[0] * inv_w[0];
      for (int i = 1; i < n - 1; ++i) rate[i] = (flux[i] - flux[i - 1]) * inv_w[i];
      rate[n - 1] = -flux[n - 2] * inv_w[n - 1];
    }

    if (telegraph) {
      // v holds d rho / dt at half steps; the first half step starts from rest.
      const double g = 0.5 * dt * b / m;
      for (int i = 0; i < n; ++i) {
        if (k == 1) {
          v[i] = 0.5 * dt * rate[i] / m / (1.0 + 0.5 * g);
        } else {
          v[i] = ((1.0 - g) * v[i] + dt * rate[i] / m) / (1.0 + g);
        }
        rho[i] += dt * v[i];
      }
    } else {
      for (int i = 0; i < n; ++i) rho[i] += dt * rate[i] / b;
    }

    const double drift_now = std::abs(res.final_density.mass() - mass0);
    res.max_mass_drift = std::max(res.max_mass_drift, drift_now);
    const double peak = *std::max_element(rho.begin(), rho.end());
    const double low = *std::min_element(rho.begin(), rho.end());
    const double neg_tol = quantum ? std::max(1e-14, cfg.floor_fraction) * peak : 1e-14 * std::max(1.0, peak);
    if (drift_now > 1e-8 || low < -neg_tol || !std::isfinite(peak)) {
      std::ostringstream os;
      os.precision(6);
      os << to_string(model) << " unstable at step " << k << " (t = " << k * dt << ", dt = " << dt
         << "): mass drift " << drift_now << ", min rho " << low;
      throw NumericalError(os.str());
    }
    if (k % stride == 0 || k == n_steps) record(k == n_steps ? cfg.t_final : k * dt);
  }
  return res;
}

}  // namespace qbrown
