#pragma once

#include <stdexcept>
#include <string>

namespace qbrown {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input values (negative mass, malformed grids, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Integrator breakdown, stability violation or non-finite arithmetic.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Inconsistent configuration: a model requested with parameters it does
/// not support, malformed grids, unknown keys.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Raw, unvalidated parameter values.
struct RawParams {
  double hbar = 1.0;
  double k_B = 1.0;
  double mass = 1.0;
  double friction = 1.0;
  double temperature = 1.0;
  double omega0 = 0.0;
  double force = 0.0;
};

/// Physical constants plus particle and bath parameters of one scenario.
///
/// Values are dimensionful reals in any consistent unit system. T = 0, b = 0
/// and omega0 = 0 are legal and select the zero-temperature, vacuum and
/// free-particle code paths respectively. The mean particle-bath interaction
/// potential is fixed to zero throughout; a constant value would be absorbed
/// into the external potential.
class PhysicalParams {
public:
  explicit PhysicalParams(const RawParams& raw);

  /// hbar = k_B = m = b = T = 1, omega0 = f = 0.
  static PhysicalParams natural_units();

  double hbar() const { return hbar_; }
  double k_B() const { return k_B_; }
  double mass() const { return mass_; }
  double friction() const { return friction_; }
  double temperature() const { return temperature_; }
  double omega0() const { return omega0_; }
  double force() const { return force_; }

  bool zero_temperature() const { return temperature_ == 0.0; }
  bool vacuum() const { return friction_ == 0.0; }

  /// 1/(k_B T). Throws DomainError at T = 0.
  double beta() const;
  /// k_B T.
  double thermal_energy() const { return k_B_ * temperature_; }

  RawParams raw() const;

  PhysicalParams with_temperature(double T) const;
  PhysicalParams with_beta(double beta) const;
  PhysicalParams with_friction(double b) const;
  PhysicalParams with_hbar(double hbar) const;
  PhysicalParams with_omega0(double w) const;
  PhysicalParams with_force(double f) const;
  PhysicalParams with_mass(double m) const;

private:
  double hbar_, k_B_, mass_, friction_, temperature_, omega0_, force_;
};

/// Build validated parameters; errors name the offending field.
PhysicalParams make_params(const RawParams& raw);

struct DerivedScales {
  double lambda_T;   ///< thermal de Broglie wavelength hbar / (2 sqrt(m k_B T))
  double D;          ///< Einstein diffusion constant k_B T / b
  double t_c;        ///< decoherence time lambda_T^2 / (2 D)
  double tau_m;      ///< momentum relaxation time m / b

  /// lambda_T^2/D > m/b, i.e. b > 2 m k_B T / hbar: inertia negligible
  /// on the decoherence time scale.
  bool overdamped_quantum_regime() const { return 2.0 * t_c > tau_m; }
};

/// Requires T > 0 and b > 0.
DerivedScales derived_scales(const PhysicalParams& p);

/// Non-equilibrium momentum dispersion m k_B T + hbar^2 / (4 sigma_x2).
double momentum_dispersion(double sigma_x2, const PhysicalParams& p);

}  // namespace qbrown
