#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qbrown/params.hpp"

namespace qbrown {

/// Uniform 1-D grid with n nodes from x_min to x_max inclusive.
class Grid1D {
public:
  Grid1D(double x_min, double x_max, int n);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  int n() const { return n_; }
  double h() const { return h_; }
  double x(int i) const { return i == n_ - 1 ? x_max_ : x_min_ + h_ * i; }
  std::vector<double> nodes() const;

  bool same_as(const Grid1D& o) const { return x_min_ == o.x_min_ && x_max_ == o.x_max_ && n_ == o.n_; }

private:
  double x_min_, x_max_;
  int n_;
  double h_;
};

struct DensityField {
  Grid1D grid;
  std::vector<double> rho;

  /// Trapezoid-rule mass.
  double mass() const;
  /// Rescales to unit trapezoid mass.
  void normalize();

  static DensityField gaussian(const Grid1D& grid, double mean, double sigma2);
  static DensityField uniform(const Grid1D& grid);
};

struct Moments {
  double mean;
  double dispersion;
  double norm;
  std::optional<std::string> warning;  ///< set when |norm - 1| > 1e-6
};

Moments moments(const DensityField& rho);

class PotentialSpec {
public:
  enum class Kind { Free, Linear, Harmonic, Quartic, Tabulated };

  static PotentialSpec free() { return PotentialSpec(Kind::Free); }
  /// U = -f x.
  static PotentialSpec linear(double f);
  /// U = m omega0^2 x^2 / 2.
  static PotentialSpec harmonic(double omega0);
  /// U = k4 x^4.
  static PotentialSpec quartic(double k4);
  /// Values per node; derivatives by central differences.
  static PotentialSpec tabulated(std::vector<double> values);

  Kind kind() const { return kind_; }
  double force() const { return a_; }
  double omega0() const { return a_; }
  double k4() const { return a_; }
  const std::vector<double>& table() const { return table_; }

  /// Throws ConfigError if the potential contradicts p (harmonic frequency
  /// or force given in both places with different values) or the grid.
  void check_consistency(const PhysicalParams& p, const Grid1D& grid) const;

private:
  explicit PotentialSpec(Kind k) : kind_(k) {}
  Kind kind_;
  double a_ = 0.0;
  std::vector<double> table_;
};

std::string_view to_string(PotentialSpec::Kind kind);

/// U, U' and U'' at every node.
struct PotentialSamples {
  std::vector<double> U, dU, d2U;
};

PotentialSamples sample_potential(const PotentialSpec& U, const PhysicalParams& p, const Grid1D& grid);

struct QuantumPotential {
  std::vector<double> Q;
  double floored_fraction;  ///< share of nodes where the density floor was applied
  double floor;             ///< absolute density floor used
};

/// Bohm potential -hbar^2 (sqrt rho)'' / (2 m sqrt rho), with rho clamped
/// from below at floor_fraction * max(rho). One-sided stencils at the ends
/// unless periodic.
QuantumPotential quantum_potential(const DensityField& rho, const PhysicalParams& p,
                                   double floor_fraction = 1e-12, bool periodic = false);

/// U + beta hbar^2 [3 U'' - beta U'^2] / (24 m).
std::vector<double> effective_potential(const PotentialSpec& U, double beta, const PhysicalParams& p,
                                        const Grid1D& grid);

enum class PdeModel {
  ClassicalTelegraph,
  ClassicalSmoluchowski,
  SemiclassicalTelegraph,
  SemiclassicalSmoluchowski,
  QuantumZeroT_Telegraph,
  QuantumZeroT_Smoluchowski,
};

std::string_view to_string(PdeModel model);
std::optional<PdeModel> pde_model_from_string(std::string_view name);
bool is_telegraph(PdeModel model);

enum class Boundary { Reflecting, Periodic };

struct EvolveConfig {
  double t_final = 1.0;
  double dt = 0.0;              ///< <= 0 picks 0.9 of the stability bound
  Boundary boundary = Boundary::Reflecting;
  int records = 100;            ///< moment samples after t = 0, evenly spaced in steps
  double floor_fraction = 1e-12;
  bool ankerhold_flux = false;  ///< position-dependent diffusion assembly for the semiclassical flux
};

struct MomentSample {
  double t, mean, dispersion, norm;
};

struct EvolveResult {
  DensityField final_density;
  std::vector<MomentSample> moments;
  long steps = 0;
  double dt = 0.0;
  double max_mass_drift = 0.0;
  double max_floored_fraction = 0.0;
};

/// Largest explicit step for which the chosen model is linearly stable on
/// this grid.
double stable_dt(PdeModel model, const PotentialSpec& U, const PhysicalParams& p, const Grid1D& grid);

/// Advances rho0 to t_final. Telegraph models start from d rho / dt = 0.
/// Throws ConfigError for model / parameter mismatches or a step above the
/// stability bound, NumericalError when mass drifts by more than 1e-8 or
/// the density turns negative.
EvolveResult evolve(const DensityField& rho0, PdeModel model, const PotentialSpec& U, const PhysicalParams& p,
                    const EvolveConfig& cfg);

}  // namespace qbrown
