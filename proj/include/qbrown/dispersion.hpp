#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qbrown/params.hpp"
#include "qbrown/special_math.hpp"

namespace qbrown {

enum class ClosedFormKind {
  Einstein,             ///< 2 D t
  VacuumSpreading,      ///< sigma0^2 + (hbar t / 2 m sigma0)^2, b = 0
  PureQuantum,          ///< hbar sqrt(t / m b)
  Superposition,        ///< hbar sqrt(t / m b) + 2 D t
  LambertExact,         ///< explicit solution of the bounded overdamped law
  CothInterpolation,    ///< 2 lambda_T sqrt(D t) coth(lambda_T / sqrt(D t))
  SemiclassicalLog,     ///< 2 D t + lambda_T^2 ln(2 D t / lambda_T^2) / 3
  ElementaryLogApprox,  ///< 2 D t + 2 lambda_T^2 ln(1 + sqrt(D t) / lambda_T)
};

std::string_view to_string(ClosedFormKind kind);
std::optional<ClosedFormKind> closed_form_from_string(std::string_view name);

struct ClosedForm {
  ClosedFormKind kind;
  double sigma0 = 0.0;  ///< initial width, VacuumSpreading only

  static ClosedForm vacuum_spreading(double sigma0);
};

struct ClosedFormValue {
  double sigma_x2;
  /// SemiclassicalLog before 2Dt exceeds lambda_T^2, where it may go
  /// negative. The value is still returned.
  bool semiclassical_defect = false;
};

/// Evaluates a closed-form dispersion law. Throws ConfigError when the kind
/// does not apply to the parameters (e.g. Einstein with T = 0).
ClosedFormValue eval_closed_form(const ClosedForm& form, double t, const PhysicalParams& p);

inline ClosedFormValue eval_closed_form(ClosedFormKind kind, double t, const PhysicalParams& p) {
  return eval_closed_form(ClosedForm{kind}, t, p);
}

struct DispersionTrajectory {
  std::string label;
  std::vector<double> times;
  std::vector<double> sigma_x2;
  std::vector<double> mu;        ///< empty when the model carries no mean
  std::vector<double> sigma_p2;  ///< m k_B T + hbar^2 / 4 sigma_x2, inf where sigma_x2 = 0
};

/// Fills sigma_p2 from sigma_x2.
void attach_momentum_dispersion(DispersionTrajectory& traj, const PhysicalParams& p);

DispersionTrajectory closed_form_trajectory(const ClosedForm& form, std::span<const double> times,
                                            const PhysicalParams& p);

/// sigma_x2 * sigma_p2 >= hbar^2 / 4 at every time with sigma_x2 > 0.
/// Returns the index of the first violation, or nullopt.
std::optional<std::size_t> first_heisenberg_violation(const DispersionTrajectory& traj,
                                                      const PhysicalParams& p);

// ---------------------------------------------------------------------------
// sigma_x^2(t, beta) on a tensor grid.

struct BetaGridFunction {
  std::vector<double> t_grid;
  std::vector<double> beta_grid;  ///< starts at 0
  std::vector<double> values;     ///< row-major: values[i * beta_grid.size() + j]

  double at(std::size_t ti, std::size_t bj) const { return values[ti * beta_grid.size() + bj]; }
  std::vector<double> column(std::size_t bj) const;
  std::size_t index_of_beta(double beta) const;
};

/// {0} followed by n-1 geometrically spaced nodes from beta_max * smallest
/// to beta_max. If physical_beta lies strictly inside, the nearest node is
/// moved onto it.
std::vector<double> make_beta_grid(double beta_max, int n, double smallest = 1e-4,
                                   std::optional<double> physical_beta = std::nullopt);

/// n points log-spaced between lo and hi inclusive.
std::vector<double> log_space(double lo, double hi, int n);

// ---------------------------------------------------------------------------
// Zero-temperature inertial dynamics of the mean and width.

struct InertialInit {
  double sigma0;      ///< > 0
  double sigma_dot0 = 0.0;
  double mu0 = 0.0;
  double mu_dot0 = 0.0;
};

/// m mu'' + b mu' = f and m sigma'' + b sigma' = hbar^2 / (4 m sigma^3),
/// integrated in sigma. Requires T = 0.
DispersionTrajectory solve_inertial_zero_T(const PhysicalParams& p, const InertialInit& init,
                                           std::span<const double> t_grid,
                                           const OdeSolverConfig& cfg = {});

// ---------------------------------------------------------------------------
// Harmonic oscillator with the quantum spring softening.

struct HarmonicInit {
  double sigma2_0;
  double sigma2_dot0 = 0.0;
  double mu0 = 0.0;
  double mu_dot0 = 0.0;
};

struct HarmonicSolution {
  DispersionTrajectory trajectory;  ///< physical beta (last grid node)
  BetaGridFunction surface;         ///< beta = 0 column holds +inf for t > 0
};

/// Integrates, for every beta node at once,
///   m s'' + b s' + 2 m (omega0^2 - (1/beta) int_0^beta hbar^2 / (4 m^2 s^2) dbeta') s = 2 / beta
/// in the variable s = sigma_x^2, plus the damped driven oscillator for the
/// mean. beta_grid must start at 0 and end at the physical beta.
HarmonicSolution solve_harmonic(const PhysicalParams& p, const HarmonicInit& init,
                                std::span<const double> t_grid, std::span<const double> beta_grid,
                                const OdeSolverConfig& cfg = {});

struct StationaryHarmonicResult {
  double sigma_x2;
  std::vector<double> beta_nodes;
  std::vector<double> profile;  ///< sigma_x^2 at beta_nodes; +inf at beta = 0
  int windows = 0;
  int iterations = 0;
  std::vector<double> residuals;
};

/// Equilibrium width from the stationary self-consistency condition,
/// imposed on the whole beta profile and solved by damped fixed-point
/// sweeps over successive beta windows.
StationaryHarmonicResult stationary_harmonic_dispersion(double beta, const PhysicalParams& p,
                                                        double tol = 1e-12, double theta = 0.7,
                                                        int max_iter = 200);

/// (hbar / 2 m omega0) coth(beta hbar omega0 / 2).
double harmonic_equilibrium_dispersion(double beta, const PhysicalParams& p);

// ---------------------------------------------------------------------------
// Overdamped free particle.

/// s' = 2 D (1 + lambda_T^2 / s). sigma2_0 = 0 is started from the explicit
/// Lambert-W solution at the first positive grid time.
DispersionTrajectory solve_overdamped_bounded(const PhysicalParams& p, double sigma2_0,
                                              std::span<const double> t_grid,
                                              const OdeSolverConfig& cfg = {});

enum class OuterDispersion {
  Unknown,          ///< outer sigma^2 solved per sweep (linear ODE per beta node)
  PreviousIterate,  ///< fully explicit substitution of the previous iterate
};

struct OverdampedFullConfig {
  double theta = 0.7;
  double tol = 1e-8;
  int max_iter = 200;
  OuterDispersion outer = OuterDispersion::Unknown;
  int nodes_per_efold = 32;      ///< internal log-time resolution
  double window_efolds = 1.0;    ///< length of one Picard window in ln t
  double start_fraction = 1e-4;  ///< internal start time / first positive output time
};

struct OverdampedFullResult {
  BetaGridFunction surface;         ///< beta = 0 column holds +inf for t > 0
  DispersionTrajectory trajectory;  ///< physical beta column
  int windows = 0;
  int sweeps = 0;
  std::vector<double> residuals;    ///< concatenated over windows
};

/// Self-consistent high-friction free-particle law
///   s'(t, beta) = 2 D(beta) (1 + s int_0^beta hbar^2 / (4 m s(t, beta')^2) dbeta')
/// with D(beta) = 1 / (beta b) and b held fixed across beta. Solved by
/// relaxed Picard sweeps started from the superposition law, marching over
/// windows in ln t. t_grid starts at 0, beta_grid at 0 and contains p.beta().
OverdampedFullResult solve_overdamped_full(const PhysicalParams& p, std::span<const double> t_grid,
                                           std::span<const double> beta_grid,
                                           const OverdampedFullConfig& cfg = {});

// ---------------------------------------------------------------------------
// Model comparison.

enum class SolvedModel { OverdampedBounded, OverdampedFull };

struct ModelSpec {
  std::optional<ClosedForm> closed_form;
  std::optional<SolvedModel> solved;

  static ModelSpec of(ClosedFormKind k) { return {ClosedForm{k}, std::nullopt}; }
  static ModelSpec of(SolvedModel m) { return {std::nullopt, m}; }
  std::string label() const;
};

std::optional<ModelSpec> model_from_string(std::string_view name);

struct ComparisonColumn {
  std::string label;
  std::vector<double> sigma_x2;  ///< empty when error is set
  std::string error;
};

struct OrderingVerdict {
  std::string claim;
  bool holds;
  double worst_margin;  ///< min over t of (upper - lower) / upper
};

struct ComparisonTable {
  std::vector<double> times;
  std::vector<ComparisonColumn> columns;
  std::vector<std::vector<double>> max_relative_deviation;  ///< pairwise, NaN for failed columns
  std::vector<OrderingVerdict> orderings;
};

/// Evaluates each model on t_grid; a model that cannot run with p records
/// its error and the rest still run.
ComparisonTable compare_models(const PhysicalParams& p, std::span<const double> t_grid,
                               const std::vector<ModelSpec>& models,
                               const OverdampedFullConfig& full_cfg = {}, int beta_nodes = 97);

}  // namespace qbrown
