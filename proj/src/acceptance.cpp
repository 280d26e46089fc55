#include "qbrown/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "parallel.hpp"
#include "qbrown/dispersion.hpp"
#include "qbrown/equilibrium.hpp"
#include "qbrown/pde.hpp"

namespace qbrown {

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget;
  std::function<Outcome()> run;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

PhysicalParams natural() { return PhysicalParams::natural_units(); }

std::vector<double> with_origin(std::vector<double> t) {
  t.insert(t.begin(), 0.0);
  return t;
}

OverdampedFullResult full_solution(const PhysicalParams& p, const std::vector<double>& t_grid) {
  return solve_overdamped_full(p, t_grid, make_beta_grid(p.beta(), 97));
}

// Zero-temperature width on the overdamped manifold: b sigma' = hbar^2 / (4 m sigma^3).
InertialInit manifold_init(const PhysicalParams& p, double sigma0) {
  InertialInit init{sigma0};
  init.sigma_dot0 = p.hbar() * p.hbar() / (4.0 * p.mass() * p.friction() * std::pow(sigma0, 3));
  return init;
}

double quartic_ratio(double s2, double s02, double t, const PhysicalParams& p) {
  const double target = p.hbar() * p.hbar() * t / (p.mass() * p.friction());
  return (s2 * s2 - s02 * s02) / target;
}

Outcome einstein_asymptote() {
  const auto p = natural();
  const auto sc = derived_scales(p);
  const double t = 100.0 * sc.t_c;
  const auto full = full_solution(p, {0.0, t});
  const double r_full = full.trajectory.sigma_x2.back() / (2.0 * sc.D * t);
  const double r_lw = eval_closed_form(ClosedFormKind::LambertExact, t, p).sigma_x2 / (2.0 * sc.D * t);
  const bool ok = r_full >= 0.99 && r_full <= 1.02 && r_lw >= 0.99 && r_lw <= 1.02;
  return {ok, "sigma2/2Dt at 100 t_c: full " + sci(r_full) + ", lambert " + sci(r_lw) + " (window [0.99, 1.02])"};
}

Outcome pure_quantum_diffusion() {
  auto p = natural();
  const auto sc = derived_scales(p);
  const auto times = log_space(1e-6 * sc.t_c, 1e-2 * sc.t_c, 25);
  const auto full = full_solution(p, with_origin(times));
  double worst_full = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double target = p.hbar() * std::sqrt(times[i] / (p.mass() * p.friction()));
    worst_full = std::max(worst_full, rel(full.trajectory.sigma_x2[i + 1], target));
  }

  const auto q = p.with_temperature(0.0).with_friction(100.0);
  const double tau = q.mass() / q.friction();
  const double sigma0 = 0.3;
  const auto t_in = log_space(10.0 * tau, 1000.0 * tau, 25);
  const auto traj = solve_inertial_zero_T(q, manifold_init(q, sigma0), with_origin(t_in));
  double worst_in = 0.0;
  for (std::size_t i = 0; i < t_in.size(); ++i)
    worst_in = std::max(worst_in, std::abs(quartic_ratio(traj.sigma_x2[i + 1], sigma0 * sigma0, t_in[i], q) - 1.0));
  const bool ok = worst_full <= 0.02 && worst_in <= 0.02;
  return {ok, "full on [1e-6, 1e-2] t_c: " + sci(worst_full) + "; inertial b=100 (sigma^4 - sigma0^4) on [10, 1e3] tau_m: " +
                  sci(worst_in) + " (tol 0.02)"};
}

Outcome lambert_exactness() {
  const auto p = natural();
  const auto sc = derived_scales(p);
  const auto times = log_space(1e-3 * sc.t_c, 1e3 * sc.t_c, 200);
  const auto ode = solve_overdamped_bounded(p, 0.0, with_origin(times));
  const double l2 = sc.lambda_T * sc.lambda_T;
  double worst = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double s = eval_closed_form(ClosedFormKind::LambertExact, times[i], p).sigma_x2;
    worst = std::max(worst, rel(ode.sigma_x2[i + 1], s));
    const double y = s / l2, z = 2.0 * sc.D * times[i] / l2;
    residual = std::max(residual, std::abs(y - std::log1p(y) - z) / z);
  }
  return {worst <= 1e-8 && residual <= 1e-8,
          "ODE vs closed form " + sci(worst) + ", implicit residual " + sci(residual) + " (tol 1e-8)"};
}

Outcome upper_bound_ordering() {
  const auto p = natural();
  const auto sc = derived_scales(p);
  const auto times = log_space(1e-3 * sc.t_c, 1e3 * sc.t_c, 60);
  std::vector<ModelSpec> models;
  for (auto name : {"superposition", "lambert-exact", "overdamped-bounded", "overdamped-full"})
    models.push_back(*model_from_string(name));
  const auto table = compare_models(p, times, models);
  bool ok = true;
  std::string detail;
  for (const auto& c : table.columns)
    if (!c.error.empty()) {
      ok = false;
      detail += c.label + " failed: " + c.error + "; ";
    }
  for (const auto& o : table.orderings) {
    ok = ok && o.holds;
    detail += o.claim + (o.holds ? " holds" : " VIOLATED") + " (margin " + sci(o.worst_margin) + "); ";
  }
  return {ok && table.orderings.size() == 4, detail};
}

Outcome harmonic_coth() {
  auto p = natural().with_omega0(1.0);
  bool ok = true;
  std::string detail;
  for (double x : {0.1, 1.0, 2.0, 10.0}) {
    const double beta = x / (p.hbar() * p.omega0());
    const auto q = p.with_beta(beta);
    const double exact = harmonic_equilibrium_dispersion(beta, q);
    const double stat = stationary_harmonic_dispersion(beta, q).sigma_x2;
    const double L = std::max(8.0, 12.0 * std::sqrt(exact));
    ImaginaryTimeConfig cfg{beta, 1024, Grid1D(-L, L, 801)};
    const auto it = imaginary_time_density(PotentialSpec::harmonic(q.omega0()), q, cfg);
    const double e_stat = rel(stat, exact), e_it = rel(moments(it.density).dispersion, exact);
    ok = ok && e_stat <= 1e-3 && e_it <= 1e-3;
    detail += "x=" + sci(x) + ": " + sci(e_stat) + "/" + sci(e_it) + "; ";
  }
  return {ok, "stationary/imaginary-time rel. error " + detail + "(tol 1e-3)"};
}

Outcome vacuum_spreading() {
  const auto p = natural().with_friction(0.0).with_temperature(0.0);
  std::vector<double> times;
  for (int i = 0; i <= 100; ++i) times.push_back(0.1 * i);
  const auto traj = solve_inertial_zero_T(p, InertialInit{1.0}, times);
  const auto form = ClosedForm::vacuum_spreading(1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i)
    worst = std::max(worst, rel(traj.sigma_x2[i], eval_closed_form(form, times[i], p).sigma_x2));
  return {worst <= 1e-6, "max rel. deviation " + sci(worst) + " on [0, 10] (tol 1e-6)"};
}

Outcome zero_T_overdamped() {
  const auto p = natural().with_temperature(0.0).with_friction(100.0);
  const double tau = p.mass() / p.friction();
  const double sigma0 = 0.3, s02 = sigma0 * sigma0;
  const auto times = log_space(10.0 * tau, 1000.0 * tau, 30);
  const auto traj = solve_inertial_zero_T(p, manifold_init(p, sigma0), with_origin(times));
  double worst_ode = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i)
    worst_ode = std::max(worst_ode, std::abs(quartic_ratio(traj.sigma_x2[i + 1], s02, times[i], p) - 1.0));

  const Grid1D grid(-7.0, 7.0, 467);
  EvolveConfig cfg;
  cfg.t_final = 1000.0 * tau;
  cfg.records = 100;
  const auto res = evolve(DensityField::gaussian(grid, 0.0, s02), PdeModel::QuantumZeroT_Smoluchowski,
                          PotentialSpec::free(), p, cfg);
  double worst_pde = 0.0;
  for (const auto& m : res.moments)
    if (m.t >= 10.0 * tau) worst_pde = std::max(worst_pde, std::abs(quartic_ratio(m.dispersion, s02, m.t, p) - 1.0));
  return {worst_ode <= 0.02 && worst_pde <= 0.02,
          "(sigma^4 - sigma0^4)/(hbar^2 t/mb) - 1: ODE " + sci(worst_ode) + ", PDE " + sci(worst_pde) + " (tol 0.02)"};
}

Outcome heisenberg_monitor() {
  const auto p = natural();
  const auto sc = derived_scales(p);
  const auto times = log_space(1e-3 * sc.t_c, 1e3 * sc.t_c, 60);
  std::vector<std::pair<DispersionTrajectory, PhysicalParams>> quantum;
  for (auto k : {ClosedFormKind::PureQuantum, ClosedFormKind::Superposition, ClosedFormKind::LambertExact,
                 ClosedFormKind::CothInterpolation, ClosedFormKind::ElementaryLogApprox})
    quantum.emplace_back(closed_form_trajectory(ClosedForm{k}, times, p), p);
  quantum.emplace_back(solve_overdamped_bounded(p, 0.0, with_origin(times)), p);
  quantum.emplace_back(full_solution(p, with_origin(times)).trajectory, p);

  const auto cold = p.with_temperature(0.0).with_friction(100.0);
  const auto t_cold = with_origin(log_space(1e-3, 10.0, 40));
  quantum.emplace_back(solve_inertial_zero_T(cold, InertialInit{0.3}, t_cold), cold);
  const auto vac = cold.with_friction(0.0);
  quantum.emplace_back(solve_inertial_zero_T(vac, InertialInit{1.0}, t_cold), vac);
  const auto osc = p.with_omega0(1.0).with_beta(2.0);
  std::vector<double> t_osc;
  for (int i = 0; i <= 60; ++i) t_osc.push_back(0.5 * i);
  quantum.emplace_back(solve_harmonic(osc, HarmonicInit{0.3}, t_osc, make_beta_grid(osc.beta(), 65)).trajectory, osc);

  std::string detail;
  bool ok = true;
  for (const auto& [tr, q] : quantum) {
    if (auto v = first_heisenberg_violation(tr, q)) {
      ok = false;
      detail += tr.label + " violates at t=" + sci(tr.times[*v]) + "; ";
    }
  }
  const auto einstein = closed_form_trajectory(ClosedForm{ClosedFormKind::Einstein}, times, p);
  const double bound = 0.25 * p.hbar() * p.hbar();
  bool below = true, above = true;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const bool violates = einstein.sigma_x2[i] * einstein.sigma_p2[i] < bound;
    if (times[i] < sc.t_c && !violates) below = false;
    if (times[i] > sc.t_c && violates) above = false;
  }
  ok = ok && below && above;
  detail += std::to_string(quantum.size()) + " quantum trajectories checked; einstein violates for t < t_c: " +
            (below ? "yes" : "no") + ", satisfies for t > t_c: " + (above ? "yes" : "no");
  return {ok, detail};
}

Outcome semiclassical_correction() {
  const auto p = natural();
  const auto sc = derived_scales(p);
  const double t = 100.0 * sc.t_c, l2 = sc.lambda_T * sc.lambda_T;
  const auto full = full_solution(p, {0.0, t});
  const double offset = (full.trajectory.sigma_x2.back() - 2.0 * sc.D * t) / l2;
  const double target = std::log(2.0 * sc.D * t / l2) / 3.0;
  const double err = rel(offset, target);

  const auto times = log_space(sc.t_c, 1e3 * sc.t_c, 60);
  bool exceeds = true;
  for (double ti : times)
    if (eval_closed_form(ClosedFormKind::ElementaryLogApprox, ti, p).sigma_x2 <
        eval_closed_form(ClosedFormKind::SemiclassicalLog, ti, p).sigma_x2)
      exceeds = false;
  return {err <= 0.1 && exceeds, "offset/lambda_T^2 at 100 t_c: " + sci(offset) + " vs ln(2Dt/lambda_T^2)/3 = " +
                                     sci(target) + " (rel " + sci(err) + ", tol 0.1); elementary above log form: " +
                                     (exceeds ? "yes" : "no")};
}

Outcome coth_limits() {
  const auto p = natural();
  const auto sc = derived_scales(p);
  const double ts = 1e-6 * sc.t_c, tl = 1e4 * sc.t_c;
  const double e_short = rel(eval_closed_form(ClosedFormKind::CothInterpolation, ts, p).sigma_x2,
                             eval_closed_form(ClosedFormKind::PureQuantum, ts, p).sigma_x2);
  const double e_long = rel(eval_closed_form(ClosedFormKind::CothInterpolation, tl, p).sigma_x2,
                            2.0 * sc.D * tl + 2.0 * sc.lambda_T * sc.lambda_T / 3.0);
  return {e_short <= 1e-4 && e_long <= 1e-3,
          "short " + sci(e_short) + " (tol 1e-4), long " + sci(e_long) + " (tol 1e-3)"};
}

Outcome conservation_ehrenfest() {
  const double f = 1.0;
  bool ok = true;
  std::string detail;
  for (auto model : {PdeModel::ClassicalTelegraph, PdeModel::ClassicalSmoluchowski, PdeModel::SemiclassicalTelegraph,
                     PdeModel::SemiclassicalSmoluchowski, PdeModel::QuantumZeroT_Telegraph,
                     PdeModel::QuantumZeroT_Smoluchowski}) {
    const bool cold = model == PdeModel::QuantumZeroT_Telegraph || model == PdeModel::QuantumZeroT_Smoluchowski;
    const auto p = cold ? natural().with_temperature(0.0).with_friction(100.0).with_force(f) : natural().with_force(f);
    const Grid1D grid = cold ? Grid1D(-3.0, 5.0, 401) : Grid1D(-15.0, 25.0, 1001);
    EvolveConfig cfg;
    cfg.t_final = cold ? 2.0 : 3.0;
    const auto res = evolve(DensityField::gaussian(grid, 0.0, cold ? 0.09 : 0.25), model, PotentialSpec::linear(f),
                            p, cfg);
    const double b = p.friction(), tau = p.mass() / b;
    double worst = 0.0;
    for (const auto& m : res.moments) {
      if (m.t < 0.1 * cfg.t_final) continue;
      const double exact = is_telegraph(model) ? (f / b) * (m.t - tau * (1.0 - std::exp(-m.t / tau))) : f * m.t / b;
      worst = std::max(worst, rel(m.mean, exact));
    }
    const double drift_tol = 1e-10 * std::max(1.0, static_cast<double>(res.steps) / 1000.0);
    const bool pass = worst <= 5e-3 && res.max_mass_drift <= drift_tol;
    ok = ok && pass;
    detail += std::string(to_string(model)) + ": mean " + sci(worst) + ", drift " + sci(res.max_mass_drift) + "; ";
  }
  return {ok, detail + "(tol 5e-3, drift 1e-10 per 1e3 steps)"};
}

Outcome equilibrium_routes() {
  std::string detail;
  bool ok = true;

  // Harmonic, beta hbar omega0 = 2.
  const auto ph = natural().with_omega0(1.0).with_beta(2.0);
  const auto Uh = PotentialSpec::harmonic(1.0);
  const Grid1D gh(-8.0, 8.0, 3201);
  const auto it_h = imaginary_time_density(Uh, ph, {2.0, 4096, gh});
  const auto eig_h = eigen_density(Uh, ph, 2.0, gh);
  double d_h = 0.0;
  for (int i = 0; i < gh.n(); ++i) d_h = std::max(d_h, std::abs(it_h.density.rho[i] - eig_h.density.rho[i]));
  const double z_h = rel(it_h.Z, eig_h.Z);
  ok = ok && d_h <= 1e-6 && z_h <= 1e-3;
  detail += "harmonic max|drho| " + sci(d_h) + ", Z rel " + sci(z_h) + "; ";

  // Quartic, k4 = 1, beta = 1.
  const auto pq = natural();
  const auto Uq = PotentialSpec::quartic(1.0);
  const Grid1D gq(-4.0, 4.0, 801);
  const auto it_q = imaginary_time_density(Uq, pq, {1.0, 4096, gq});
  const auto eig_q = eigen_density(Uq, pq, 1.0, gq);
  double d_q = 0.0;
  for (int i = 0; i < gq.n(); ++i) d_q = std::max(d_q, std::abs(it_q.density.rho[i] - eig_q.density.rho[i]));
  const double z_q = rel(it_q.Z, eig_q.Z);
  ok = ok && d_q <= 1e-6 && z_q <= 1e-3;
  detail += "quartic max|drho| " + sci(d_q) + ", Z rel " + sci(z_q) + "; ";

  // Semiclassical density at beta hbar omega0 = 0.3.
  const auto ps = natural().with_omega0(1.0).with_beta(0.3);
  const double L = std::max(8.0, 12.0 * std::sqrt(harmonic_equilibrium_dispersion(0.3, ps)));
  const Grid1D gs(-L, L, 801);
  const double s_sc = moments(semiclassical_density(Uh, ps, 0.3, gs)).dispersion;
  const double s_eig = moments(eigen_density(Uh, ps, 0.3, gs).density).dispersion;
  const double s_it = moments(imaginary_time_density(Uh, ps, {0.3, 1024, gs}).density).dispersion;
  const double e_sc = std::max(rel(s_sc, s_eig), rel(s_sc, s_it));
  ok = ok && e_sc <= 5e-3;
  detail += "semiclassical sigma2 vs both " + sci(e_sc) + " (tols 1e-6, 1e-3, 5e-3)";
  return {ok, detail};
}

Outcome telegraph_moments() {
  const auto p = natural();
  const double D = p.thermal_energy() / p.friction(), tau = p.mass() / p.friction();
  const Grid1D grid(-25.0, 25.0, 2501);
  const double s02 = 0.09;
  EvolveConfig cfg;
  cfg.t_final = 20.0;
  cfg.records = 200;
  const auto res =
      evolve(DensityField::gaussian(grid, 0.0, s02), PdeModel::ClassicalTelegraph, PotentialSpec::free(), p, cfg);
  double worst = 0.0;
  for (const auto& m : res.moments) {
    if (m.t < 0.5) continue;
    const double exact = s02 + 2.0 * D * (m.t - tau * (1.0 - std::exp(-m.t / tau)));
    worst = std::max(worst, rel(m.dispersion, exact));
  }
  return {worst <= 0.02, "max rel. deviation " + sci(worst) + " on [0.5, 20] (tol 0.02)"};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "einstein-asymptote", 10, einstein_asymptote},
      {2, "pure-quantum-diffusion", 10, pure_quantum_diffusion},
      {3, "lambert-exactness", 1, lambert_exactness},
      {4, "upper-bound-ordering", 30, upper_bound_ordering},
      {5, "harmonic-coth", 30, harmonic_coth},
      {6, "vacuum-spreading", 1, vacuum_spreading},
      {7, "zero-T-overdamped", 60, zero_T_overdamped},
      {8, "heisenberg-monitor", 1, heisenberg_monitor},
      {9, "semiclassical-correction", 30, semiclassical_correction},
      {10, "coth-limits", 1, coth_limits},
      {11, "pde-conservation-ehrenfest", 60, conservation_ehrenfest},
      {12, "equilibrium-routes", 60, equilibrium_routes},
      {13, "telegraph-moments", 60, telegraph_moments},
  };
  return list;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(bool quick, int jobs) {
  const auto& list = criteria();
  std::vector<CriterionResult> out(list.size());
  detail::parallel_for(list.size(), jobs, [&](std::size_t i) {
    const auto& c = list[i];
    auto& r = out[i];
    r.id = c.id;
    r.name = c.name;
    r.budget = c.budget;
    if (quick && c.budget > 10) {
      r.skipped = true;
      r.detail = "skipped in quick mode";
      return;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto o = c.run();
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > r.budget) {
      r.pass = false;
      r.detail += "; over time budget";
    }
  });
  return out;
}

std::string format_verdict(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "[%s] %02d %-28s (%.2f s / %g s) ", r.skipped ? "SKIP" : r.pass ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.seconds, r.budget);
  return head + r.detail;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.skipped && !r.pass) return false;
  return true;
}

}  // namespace qbrown
