#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qbrown/params.hpp"
#include "qbrown/pde.hpp"

namespace qbrown {

/// Discrete Hamiltonian -hbar^2/(2m) d^2/dx^2 + U on a grid. Reflecting
/// walls mirror the end nodes, which makes the operator self-adjoint under
/// the trapezoid inner product.
struct ImaginaryTimeConfig {
  double beta_final;
  int n_beta_steps = 512;
  Grid1D grid;
  bool renormalize_each_step = true;
  Boundary boundary = Boundary::Reflecting;
};

/// Unit-normalized density together with the partition value.
struct EquilibriumDensity {
  DensityField density;
  double Z;
  double log_Z;
};

/// Propagates d phi / d beta = -H phi / 2 from the uniform profile
/// phi(0)^2 = 1 / Lambda, Lambda = sqrt(2 pi hbar^2 beta / m), by Strang
/// splitting with a Crank-Nicolson kinetic step. Returns rho = phi^2 / int phi^2
/// and Z = int phi^2, which tends to the classical partition function as
/// hbar -> 0.
EquilibriumDensity imaginary_time_density(const PotentialSpec& U, const PhysicalParams& p,
                                          const ImaginaryTimeConfig& cfg);

struct SpectralDecomposition {
  std::vector<double> energies;               ///< increasing
  std::vector<std::vector<double>> states;    ///< trapezoid-orthonormal
  int count() const { return static_cast<int>(energies.size()); }
};

/// Lowest n_states eigenpairs of the discrete Hamiltonian (reflecting walls).
SpectralDecomposition spectrum(const PotentialSpec& U, const PhysicalParams& p, const Grid1D& grid, int n_states);

struct EigenDensity {
  DensityField density;
  double Z;
  double log_Z;
  SpectralDecomposition spectrum;
  double tail_weight;                  ///< share of the Boltzmann sum beyond the retained states
  std::optional<std::string> warning;  ///< tail weight above 1e-12
};

/// Canonical mixture sum_n exp(-beta E_n) phi_n^2 / Z with Z = sum_n exp(-beta E_n).
/// n_states = 0 retains states until the tail weight drops below 1e-12.
EigenDensity eigen_density(const PotentialSpec& U, const PhysicalParams& p, double beta, const Grid1D& grid,
                           int n_states = 0);

/// exp(-beta H / 2) applied to the same uniform profile as the imaginary-time
/// route, evaluated exactly in the eigenbasis. Shares its normalization.
EquilibriumDensity spectral_propagation_density(const PotentialSpec& U, const PhysicalParams& p, double beta,
                                                const Grid1D& grid);

/// exp(-beta U_eff) normalized, U_eff = U + beta hbar^2 [3 U'' - beta U'^2] / 24 m.
DensityField semiclassical_density(const PotentialSpec& U, const PhysicalParams& p, double beta,
                                   const Grid1D& grid);

/// k_B (beta Q(beta) - int_0^beta Q dbeta') per node, i.e. (Q - k_B T int Q) / T,
/// from densities at increasing beta_nodes that start at 0 and end at beta.
std::vector<double> quantum_entropy(const std::vector<DensityField>& rho_per_beta,
                                    const std::vector<double>& beta_nodes, const PhysicalParams& p);

}  // namespace qbrown
