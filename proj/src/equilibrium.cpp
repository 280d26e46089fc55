#include "qbrown/equilibrium.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qbrown/special_math.hpp"

namespace qbrown {

namespace {

double thermal_wavelength_log(double beta, const PhysicalParams& p) {
  return 0.5 * std::log(2.0 * std::numbers::pi * p.hbar() * p.hbar() * beta / p.mass());
}

std::vector<double> trapezoid_weights(const Grid1D& g) {
  std::vector<double> w(g.n(), g.h());
  w.front() = w.back() = 0.5 * g.h();
  return w;
}

// Symmetric tridiagonal form W^{1/2} H W^{-1/2} of the reflecting-wall Hamiltonian.
void symmetric_hamiltonian(const PotentialSpec& U, const PhysicalParams& p, const Grid1D& g, std::vector<double>& d,
                           std::vector<double>& e) {
  const int n = g.n();
  const double c = p.hbar() * p.hbar() / (2.0 * p.mass() * g.h() * g.h());
  const auto s = sample_potential(U, p, g);
  d.resize(n);
  e.assign(n - 1, -c);
  for (int i = 0; i < n; ++i) d[i] = 2.0 * c + s.U[i];
  e.front() = e.back() = -std::numbers::sqrt2 * c;
}

std::vector<double> all_energies(const PotentialSpec& U, const PhysicalParams& p, const Grid1D& g) {
  std::vector<double> d, e;
  symmetric_hamiltonian(U, p, g, d, e);
  const lapack_int info = LAPACKE_dsterf(g.n(), d.data(), e.data());
  if (info != 0) throw NumericalError("tridiagonal eigenvalue solve failed (info " + std::to_string(info) + ")");
  return d;
}

SpectralDecomposition lowest_states(const PotentialSpec& U, const PhysicalParams& p, const Grid1D& g, int count) {
  const int n = g.n();
  if (count < 1 || count > n) throw ConfigError("state count must lie in [1, grid nodes]");
  std::vector<double> d, e;
  symmetric_hamiltonian(U, p, g, d, e);
  e.push_back(0.0);  // dstevr workspace convention
  std::vector<double> w(n), z(static_cast<std::size_t>(n) * count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, count, 0.0,
                                         &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != count)
    throw NumericalError("tridiagonal eigen-solve failed (info " + std::to_string(info) + ")");

  SpectralDecomposition out;
  out.energies.assign(w.begin(), w.begin() + count);
  const auto wt = trapezoid_weights(g);
  out.states.resize(count);
  for (int k = 0; k < count; ++k) {
    auto& phi = out.states[k];
    phi.resize(n);
    double sign = 0.0;
    for (int i = 0; i < n; ++i) {
      phi[i] = z[static_cast<std::size_t>(k) * n + i] / std::sqrt(wt[i]);
      if (sign == 0.0 && std::abs(phi[i]) > 1e-8) sign = phi[i] > 0.0 ? 1.0 : -1.0;
    }
    // Fix the sign so the first significant value is positive.
    if (sign < 0.0)
      for (double& v : phi) v = -v;
  }
  return out;
}

// Thomas algorithm for a general tridiagonal system; sub[0] and sup[n-1] unused.
std::vector<double> solve_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                                      const std::vector<double>& sup, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n);
  double denom = diag[0];
  c[0] = sup[0] / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - sub[i] * c[i - 1];
    c[i] = i + 1 < n ? sup[i] / denom : 0.0;
    rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

// Cyclic tridiagonal system with corner entries `corner` at (0, n-1) and
// (n-1, 0), by Sherman-Morrison.
std::vector<double> solve_cyclic(const std::vector<double>& sub, std::vector<double> diag,
                                 const std::vector<double>& sup, double corner, const std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  const double gamma = -diag[0];
  diag[0] -= gamma;
  diag[n - 1] -= corner * corner / gamma;
  const auto x = solve_tridiagonal(sub, diag, sup, rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = corner;
  const auto q = solve_tridiagonal(sub, diag, sup, u);
  const double fact = (x[0] + corner * x[n - 1] / gamma) / (1.0 + q[0] + corner * q[n - 1] / gamma);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * q[i];
  return out;
}

}  // namespace

EquilibriumDensity imaginary_time_density(const PotentialSpec& U, const PhysicalParams& p,
                                          const ImaginaryTimeConfig& cfg) {
  if (!(cfg.beta_final > 0.0) || !std::isfinite(cfg.beta_final)) throw ConfigError("beta_final must be positive");
  if (cfg.n_beta_steps < 16) throw ConfigError("n_beta_steps must be at least 16");
  if (!p.zero_temperature() && std::abs(p.beta() - cfg.beta_final) > 1e-12 * cfg.beta_final)
    throw ConfigError("beta_final does not match the temperature in params");
  const Grid1D& g = cfg.grid;
  const bool periodic = cfg.boundary == Boundary::Periodic;
  const int n = periodic ? g.n() - 1 : g.n();  // unknowns
  const double dbeta = cfg.beta_final / cfg.n_beta_steps;
  const double c = p.hbar() * p.hbar() / (2.0 * p.mass() * g.h() * g.h());
  const double a = 0.25 * dbeta;  // CN half-weight for d phi / d beta = -K phi / 2

  const auto s = sample_potential(U, p, g);
  if (periodic && std::abs(s.U.front() - s.U.back()) > 1e-12 * (1.0 + std::abs(s.U.front())))
    throw ConfigError("periodic boundaries need a potential with equal end values");
  std::vector<double> half(n);
  for (int i = 0; i < n; ++i) half[i] = std::exp(-0.25 * dbeta * s.U[i]);

  // Kinetic rows K = c * (2, -1, -1), mirrored at reflecting ends.
  std::vector<double> lo(n, -c), di(n, 2.0 * c), up(n, -c);
  if (!periodic) {
    up[0] = -2.0 * c;
    lo[n - 1] = -2.0 * c;
  }
  std::vector<double> lhs_lo(n), lhs_di(n), lhs_up(n);
  for (int i = 0; i < n; ++i) {
    lhs_lo[i] = a * lo[i];
    lhs_di[i] = 1.0 + a * di[i];
    lhs_up[i] = a * up[i];
  }

  std::vector<double> w(n, g.h());
  if (!periodic) w.front() = w.back() = 0.5 * g.h();
  auto norm2 = [&](const std::vector<double>& v) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += w[i] * v[i] * v[i];
    return acc;
  };

  std::vector<double> phi(n, std::exp(-0.5 * thermal_wavelength_log(cfg.beta_final, p)));
  double log_scale = 0.0;  // log of the factor removed from int phi^2
  std::vector<double> rhs(n);
  for (int step = 1; step <= cfg.n_beta_steps; ++step) {
    for (int i = 0; i < n; ++i) phi[i] *= half[i];
    for (int i = 0; i < n; ++i) {
      const int l = i == 0 ? (periodic ? n - 1 : -1) : i - 1;
      const int r = i == n - 1 ? (periodic ? 0 : -1) : i + 1;
      double k = di[i] * phi[i];
      if (l >= 0) k += lo[i] * phi[l];
      if (r >= 0) k += up[i] * phi[r];
      rhs[i] = phi[i] - a * k;
    }
    phi = periodic ? solve_cyclic(lhs_lo, lhs_di, lhs_up, -a * c, rhs) : solve_tridiagonal(lhs_lo, lhs_di, lhs_up, rhs);
    for (int i = 0; i < n; ++i) phi[i] *= half[i];

    const double nn = norm2(phi);
    if (!std::isfinite(nn) || !(nn > 0.0)) {
      std::ostringstream os;
      os << "imaginary-time propagation lost its norm at step " << step << " (dbeta = " << dbeta << ")";
      throw NumericalError(os.str());
    }
    if (cfg.renormalize_each_step) {
      const double sc = std::sqrt(nn);
      for (double& v : phi) v /= sc;
      log_scale += std::log(nn);
    }
  }

  const double nn = norm2(phi);
  EquilibriumDensity out{DensityField{g, std::vector<double>(g.n())}, 0.0, log_scale + std::log(nn)};
  for (int i = 0; i < n; ++i) out.density.rho[i] = phi[i] * phi[i] / nn;
  if (periodic) out.density.rho[g.n() - 1] = out.density.rho[0];
  out.density.normalize();
  out.Z = std::exp(out.log_Z);
  return out;
}

SpectralDecomposition spectrum(const PotentialSpec& U, const PhysicalParams& p, const Grid1D& grid, int n_states) {
  return lowest_states(U, p, grid, n_states);
}

EigenDensity eigen_density(const PotentialSpec& U, const PhysicalParams& p, double beta, const Grid1D& grid,
                           int n_states) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive and finite");
  const auto energies = all_energies(U, p, grid);
  const double e0 = energies.front();
  // suffix[k] = Boltzmann weight of states k and above, summed from the top
  std::vector<double> suffix(energies.size() + 1, 0.0);
  for (std::size_t k = energies.size(); k-- > 0;) suffix[k] = suffix[k + 1] + std::exp(-beta * (energies[k] - e0));
  const double total = suffix[0];

  int count = n_states;
  if (count <= 0) {
    count = 1;
    while (count < grid.n() && suffix[count] / total > 1e-12) ++count;
  }
  count = std::clamp(count, 1, grid.n());

  EigenDensity out{DensityField{grid, std::vector<double>(grid.n(), 0.0)}, 0.0, 0.0,
                   lowest_states(U, p, grid, count), 0.0, std::nullopt};
  double kept = 0.0;
  for (int k = 0; k < count; ++k) {
    const double wk = std::exp(-beta * (out.spectrum.energies[k] - e0));
    kept += wk;
    const auto& phi = out.spectrum.states[k];
    for (int i = 0; i < grid.n(); ++i) out.density.rho[i] += wk * phi[i] * phi[i];
  }
  for (double& r : out.density.rho) r /= kept;
  out.log_Z = -beta * e0 + std::log(kept);
  out.Z = std::exp(out.log_Z);
  out.tail_weight = suffix[count] / total;
  if (out.tail_weight > 1e-12) {
    std::ostringstream os;
    os << "eigen sum truncated at " << count << " states; tail weight " << out.tail_weight;
    out.warning = os.str();
  }
  return out;
}

EquilibriumDensity spectral_propagation_density(const PotentialSpec& U, const PhysicalParams& p, double beta,
                                                const Grid1D& grid) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive and finite");
  const auto energies = all_energies(U, p, grid);
  const double e0 = energies.front();
  int count = 0;
  while (count < grid.n() && std::exp(-0.5 * beta * (energies[count] - e0)) > 1e-17) ++count;
  const auto sp = lowest_states(U, p, grid, std::max(count, 1));
  const auto w = trapezoid_weights(grid);

  std::vector<double> phi(grid.n(), 0.0);
  double sum_sq = 0.0;
  for (int k = 0; k < sp.count(); ++k) {
    double overlap = 0.0;
    for (int i = 0; i < grid.n(); ++i) overlap += w[i] * sp.states[k][i];
    const double amp = std::exp(-0.5 * beta * (sp.energies[k] - e0)) * overlap;
    sum_sq += amp * amp;
    for (int i = 0; i < grid.n(); ++i) phi[i] += amp * sp.states[k][i];
  }
  EquilibriumDensity out{DensityField{grid, std::vector<double>(grid.n())}, 0.0, 0.0};
  for (int i = 0; i < grid.n(); ++i) out.density.rho[i] = phi[i] * phi[i];
  out.density.normalize();
  out.log_Z = -beta * e0 - thermal_wavelength_log(beta, p) + std::log(sum_sq);
  out.Z = std::exp(out.log_Z);
  return out;
}

DensityField semiclassical_density(const PotentialSpec& U, const PhysicalParams& p, double beta, const Grid1D& grid) {
  const auto ueff = effective_potential(U, beta, p, grid);
  const double lowest = *std::min_element(ueff.begin(), ueff.end());
  const double inner = *std::min_element(ueff.begin() + 1, ueff.end() - 1);
  const double slack = 1e-12 * std::max(1.0, std::abs(inner));
  if (ueff.front() < inner - slack || ueff.back() < inner - slack)
    throw DomainError("effective potential is not confining on the grid; semiclassical density not normalizable");
  DensityField f{grid, std::vector<double>(grid.n())};
  for (int i = 0; i < grid.n(); ++i) f.rho[i] = std::exp(-beta * (ueff[i] - lowest));
  f.normalize();
  return f;
}

std::vector<double> quantum_entropy(const std::vector<DensityField>& rho_per_beta,
                                    const std::vector<double>& beta_nodes, const PhysicalParams& p) {
  if (rho_per_beta.size() != beta_nodes.size() || beta_nodes.size() < 2)
    throw ConfigError("quantum entropy needs one density per beta node and at least two nodes");
  if (beta_nodes.front() != 0.0) throw ConfigError("beta nodes must start at 0");
  for (std::size_t j = 1; j < beta_nodes.size(); ++j) {
    if (!(beta_nodes[j] > beta_nodes[j - 1])) throw ConfigError("beta nodes must increase");
    if (!rho_per_beta[j].grid.same_as(rho_per_beta[0].grid))
      throw ConfigError("densities at different beta nodes live on different grids");
  }
  const int n = rho_per_beta[0].grid.n();
  std::vector<std::vector<double>> q;
  q.reserve(rho_per_beta.size());
  for (const auto& r : rho_per_beta) q.push_back(quantum_potential(r, p).Q);

  const double beta = beta_nodes.back();
  std::vector<double> out(n), column(beta_nodes.size());
  for (int i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < beta_nodes.size(); ++j) column[j] = q[j][i];
    const double integral = cumulative_integral(beta_nodes, column).back();
    out[i] = p.k_B() * (beta * q.back()[i] - integral);
  }
  return out;
}

}  // namespace qbrown
