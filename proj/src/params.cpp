#include "qbrown/params.hpp"

#include <cmath>
#include <limits>

namespace qbrown {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite");
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (!(v > 0.0)) throw ValidationError(std::string(name) + " must be positive");
}

void require_non_negative(double v, const char* name) {
  require_finite(v, name);
  if (v < 0.0) throw ValidationError(std::string(name) + " must be non-negative");
}

}  // namespace

PhysicalParams::PhysicalParams(const RawParams& raw)
    : hbar_(raw.hbar),
      k_B_(raw.k_B),
      mass_(raw.mass),
      friction_(raw.friction),
      temperature_(raw.temperature),
      omega0_(raw.omega0),
      force_(raw.force) {
  require_positive(hbar_, "hbar");
  require_positive(k_B_, "k_B");
  require_positive(mass_, "mass");
  require_non_negative(friction_, "friction");
  require_non_negative(temperature_, "temperature");
  require_non_negative(omega0_, "omega0");
  require_finite(force_, "force");
}

PhysicalParams PhysicalParams::natural_units() { return PhysicalParams(RawParams{}); }

double PhysicalParams::beta() const {
  if (zero_temperature()) throw DomainError("beta is infinite at zero temperature");
  return 1.0 / (k_B_ * temperature_);
}

RawParams PhysicalParams::raw() const {
  return RawParams{hbar_, k_B_, mass_, friction_, temperature_, omega0_, force_};
}

PhysicalParams PhysicalParams::with_temperature(double T) const {
  auto r = raw();
  r.temperature = T;
  return PhysicalParams(r);
}

PhysicalParams PhysicalParams::with_beta(double beta) const {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  return with_temperature(1.0 / (k_B_ * beta));
}

PhysicalParams PhysicalParams::with_friction(double b) const {
  auto r = raw();
  r.friction = b;
  return PhysicalParams(r);
}

PhysicalParams PhysicalParams::with_hbar(double hbar) const {
  auto r = raw();
  r.hbar = hbar;
  return PhysicalParams(r);
}

PhysicalParams PhysicalParams::with_omega0(double w) const {
  auto r = raw();
  r.omega0 = w;
  return PhysicalParams(r);
}

PhysicalParams PhysicalParams::with_force(double f) const {
  auto r = raw();
  r.force = f;
  return PhysicalParams(r);
}

PhysicalParams PhysicalParams::with_mass(double m) const {
  auto r = raw();
  r.mass = m;
  return PhysicalParams(r);
}

PhysicalParams make_params(const RawParams& raw) { return PhysicalParams(raw); }

DerivedScales derived_scales(const PhysicalParams& p) {
  if (p.zero_temperature())
    throw DomainError("scales undefined at T = 0; use the zero-temperature dispersion models");
  if (p.vacuum())
    throw DomainError("scales undefined at b = 0; use the vacuum-spreading model");
  DerivedScales s{};
  s.lambda_T = p.hbar() / (2.0 * std::sqrt(p.mass() * p.thermal_energy()));
  s.D = p.thermal_energy() / p.friction();
  s.t_c = s.lambda_T * s.lambda_T / (2.0 * s.D);
  s.tau_m = p.mass() / p.friction();
  return s;
}

double momentum_dispersion(double sigma_x2, const PhysicalParams& p) {
  if (!(sigma_x2 > 0.0)) throw DomainError("position dispersion must be positive");
  const double thermal = p.mass() * p.thermal_energy();
  if (std::isinf(sigma_x2)) return thermal;
  return thermal + p.hbar() * p.hbar() / (4.0 * sigma_x2);
}

}  // namespace qbrown
