#include "qbrown/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "parallel.hpp"
#include "qbrown/acceptance.hpp"
#include "qbrown/csv.hpp"
#include "qbrown/dispersion.hpp"
#include "qbrown/equilibrium.hpp"
#include "qbrown/pde.hpp"

namespace qbrown {

namespace {

namespace fs = std::filesystem;

struct Check {
  std::string name;
  std::string verdict;  // PASS, FAIL or INFO
  std::string detail;
};

std::string num(double v) { return format_double(v); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// Everything a run writes, plus the manifest sections.
class Run {
public:
  Run(const ScenarioConfig& cfg, const RunOptions& opt) : cfg(cfg), opt(opt) {}

  const ScenarioConfig& cfg;
  const RunOptions& opt;
  std::vector<std::pair<std::string, std::string>> solver;
  std::vector<Check> checks;
  std::vector<std::string> files;

  CsvWriter csv(const std::string& file, std::vector<std::string> columns) {
    files.push_back(file);
    return CsvWriter((fs::path(opt.out_dir) / file).string(), std::move(columns));
  }
  void setting(const std::string& key, const std::string& value) { solver.emplace_back(key, value); }
  void setting(const std::string& key, double value) { solver.emplace_back(key, num(value)); }
  void check(const std::string& name, bool pass, const std::string& detail) {
    checks.push_back({name, pass ? "PASS" : "FAIL", detail});
  }
  void info(const std::string& name, const std::string& detail) { checks.push_back({name, "INFO", detail}); }
};

OdeSolverConfig ode_config(const ScenarioConfig& cfg) {
  OdeSolverConfig c;
  c.method = cfg.text("ode.method") == "rk4" ? OdeMethod::RK4 : OdeMethod::RK45;
  c.rel_tol = cfg.number("ode.rel_tol");
  c.abs_tol = cfg.number("ode.abs_tol");
  if (!cfg.is_auto("ode.max_step")) c.max_step = cfg.number("ode.max_step");
  return c;
}

void record_ode(Run& run, const OdeSolverConfig& c) {
  run.setting("ode.method", c.method == OdeMethod::RK4 ? "rk4" : "rk45");
  run.setting("ode.rel_tol", c.rel_tol);
  run.setting("ode.abs_tol", c.abs_tol);
  run.setting("ode.max_step", c.max_step);
}

double time_unit(const ScenarioConfig& cfg) {
  const auto& unit = cfg.text("time.unit");
  if (unit == "absolute") return 1.0;
  const auto& p = cfg.params;
  if (unit == "tau_m") {
    if (p.vacuum()) throw ConfigError("time.unit = tau_m needs friction > 0");
    return p.mass() / p.friction();
  }
  if (p.vacuum() || p.zero_temperature()) throw ConfigError("time.unit = t_c needs temperature > 0 and friction > 0");
  return derived_scales(p).t_c;
}

/// Output times in absolute units; origin prepends t = 0.
std::vector<double> time_grid(Run& run, bool origin) {
  const auto& cfg = run.cfg;
  const double unit = time_unit(cfg);
  const double lo = cfg.number("time.start") * unit, hi = cfg.number("time.end") * unit;
  if (!(hi > lo)) throw ConfigError("time.end must exceed time.start");
  const int n = static_cast<int>(cfg.integer("time.points"));
  std::vector<double> t;
  if (cfg.text("time.spacing") == "log") {
    t = log_space(lo, hi, n);
  } else {
    for (int i = 0; i < n; ++i) t.push_back(i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1));
  }
  if (origin) t.insert(t.begin(), 0.0);
  run.setting("time.unit_seconds", unit);
  run.setting("time.first", t.front());
  run.setting("time.last", t.back());
  run.setting("time.count", static_cast<double>(t.size()));
  return t;
}

void heisenberg_check(Run& run, const DispersionTrajectory& tr, const PhysicalParams& p) {
  if (auto v = first_heisenberg_violation(tr, p))
    run.check("heisenberg:" + tr.label, false, "sigma_x2 sigma_p2 < hbar^2/4 at t = " + num(tr.times[*v]));
  else
    run.check("heisenberg:" + tr.label, true, "bound holds at all " + std::to_string(tr.times.size()) + " times");
}

// ---------------------------------------------------------------------------

void run_inertial(Run& run) {
  const auto& cfg = run.cfg;
  const auto& p = cfg.params;
  const bool vacuum = cfg.scenario == "vacuum-spreading";
  InertialInit init{cfg.number("init.sigma0")};
  init.mu0 = cfg.number("init.mu0");
  init.mu_dot0 = cfg.number("init.mu_dot0");
  if (cfg.is_auto("init.sigma_dot0")) {
    init.sigma_dot0 =
        p.vacuum() ? 0.0 : p.hbar() * p.hbar() / (4.0 * p.mass() * p.friction() * std::pow(init.sigma0, 3));
  } else {
    init.sigma_dot0 = cfg.number("init.sigma_dot0");
  }
  run.setting("init.sigma_dot0", init.sigma_dot0);
  const auto ode = ode_config(cfg);
  record_ode(run, ode);
  const auto t = time_grid(run, true);
  const auto tr = solve_inertial_zero_T(p, init, t, ode);

  const double s02 = init.sigma0 * init.sigma0;
  auto reference = [&](double ti) {
    if (vacuum) return eval_closed_form(ClosedForm::vacuum_spreading(init.sigma0), ti, p).sigma_x2;
    return std::sqrt(s02 * s02 + p.hbar() * p.hbar() * ti / (p.mass() * p.friction()));
  };
  const bool has_reference = vacuum || !p.vacuum();
  std::vector<std::string> cols = {"t[time]", "sigma_x2[length^2]", "sigma_p2[momentum^2]", "mu[length]"};
  if (has_reference) cols.push_back(vacuum ? "sigma_x2_free_spreading[length^2]" : "sigma_x2_overdamped[length^2]");
  auto out = run.csv("trajectory.csv", cols);
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::vector<double> row = {t[i], tr.sigma_x2[i], tr.sigma_p2[i], tr.mu[i]};
    if (has_reference) {
      const double r = reference(t[i]);
      row.push_back(r);
      worst = std::max(worst, rel(tr.sigma_x2[i], r));
    }
    out.row(row);
  }
  heisenberg_check(run, tr, p);
  if (vacuum)
    run.check("free-spreading-law", worst <= 1e-6, "max rel. deviation " + sci(worst) + " (tol 1e-6)");
  else if (has_reference)
    run.info("overdamped-law", "max rel. deviation from sqrt(sigma0^4 + hbar^2 t/mb): " + sci(worst));
}

void run_harmonic(Run& run) {
  const auto& cfg = run.cfg;
  const auto& p = cfg.params;
  HarmonicInit init{cfg.number("init.sigma2_0"), cfg.number("init.sigma2_dot0"), cfg.number("init.mu0"),
                    cfg.number("init.mu_dot0")};
  const auto ode = ode_config(cfg);
  record_ode(run, ode);
  const auto t = time_grid(run, true);
  const auto betas = make_beta_grid(p.beta(), static_cast<int>(cfg.integer("beta.nodes")), cfg.number("beta.smallest"));
  run.setting("beta.max", betas.back());
  run.setting("beta.nodes", static_cast<double>(betas.size()));
  const auto sol = solve_harmonic(p, init, t, betas, ode);
  const auto& tr = sol.trajectory;
  const double eq = harmonic_equilibrium_dispersion(p.beta(), p);
  auto out = run.csv("trajectory.csv", {"t[time]", "sigma_x2[length^2]", "sigma_p2[momentum^2]", "mu[length]",
                                        "sigma_x2_equilibrium[length^2]"});
  for (std::size_t i = 0; i < t.size(); ++i) out.row({t[i], tr.sigma_x2[i], tr.sigma_p2[i], tr.mu[i], eq});
  heisenberg_check(run, tr, p);
  run.info("equilibrium-approach", "final sigma_x2 " + num(tr.sigma_x2.back()) + " vs (hbar/2m omega0) coth " +
                                       num(eq) + " (rel " + sci(rel(tr.sigma_x2.back(), eq)) + ")");
}

void run_comparison(Run& run) {
  const auto& cfg = run.cfg;
  const auto& p = cfg.params;
  std::vector<ModelSpec> models;
  for (const auto& name : cfg.list("models")) models.push_back(*model_from_string(name));
  OverdampedFullConfig full;
  full.theta = cfg.number("picard.theta");
  full.tol = cfg.number("picard.tol");
  full.max_iter = static_cast<int>(cfg.integer("picard.max_iter"));
  full.outer = cfg.text("picard.outer") == "previous-iterate" ? OuterDispersion::PreviousIterate
                                                                : OuterDispersion::Unknown;
  full.nodes_per_efold = static_cast<int>(cfg.integer("picard.nodes_per_efold"));
  full.window_efolds = cfg.number("picard.window_efolds");
  full.start_fraction = cfg.number("picard.start_fraction");
  const int beta_nodes = static_cast<int>(cfg.integer("beta.nodes"));
  for (const char* k : {"picard.theta", "picard.tol", "picard.window_efolds", "picard.start_fraction"})
    run.setting(k, cfg.number(k));
  run.setting("picard.max_iter", cfg.text("picard.max_iter"));
  run.setting("picard.outer", cfg.text("picard.outer"));
  run.setting("picard.nodes_per_efold", cfg.text("picard.nodes_per_efold"));
  run.setting("beta.nodes", static_cast<double>(beta_nodes));
  run.setting("beta.smallest", 1e-4);

  const auto t = time_grid(run, false);
  const auto table = compare_models(p, t, models, full, beta_nodes);
  const auto sc = derived_scales(p);

  std::vector<std::string> cols = {"t[time]"};
  std::vector<const ComparisonColumn*> ok_cols;
  for (const auto& c : table.columns) {
    if (!c.error.empty()) {
      run.check("model:" + c.label, false, c.error);
      continue;
    }
    ok_cols.push_back(&c);
    cols.push_back("sigma_x2:" + c.label + "[length^2]");
  }
  for (const auto* c : ok_cols) cols.push_back("sigma_p2:" + c->label + "[momentum^2]");
  cols.push_back("mu[length]");
  auto out = run.csv("trajectory.csv", cols);
  const double einstein_p2 = p.mass() * p.thermal_energy();
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::vector<double> row = {t[i]};
    for (const auto* c : ok_cols) row.push_back(c->sigma_x2[i]);
    for (const auto* c : ok_cols)
      row.push_back(c->label == "einstein"   ? einstein_p2
                    : c->sigma_x2[i] > 0.0 ? momentum_dispersion(c->sigma_x2[i], p)
                                           : std::numeric_limits<double>::quiet_NaN());
    row.push_back(p.force() * t[i] / p.friction());
    out.row(row);
  }

  for (const auto* c : ok_cols) {
    DispersionTrajectory tr{c->label, t, c->sigma_x2, {}, {}};
    if (c->label == "einstein") {
      tr.sigma_p2.assign(t.size(), einstein_p2);
      const auto v = first_heisenberg_violation(tr, p);
      run.info("heisenberg:einstein", v ? "classical momentum violates the bound up to t_c = " + num(sc.t_c)
                                        : "no violation on this grid");
      continue;
    }
    if (c->label == "semiclassical-log") continue;  // asymptotic form, negative at short times
    attach_momentum_dispersion(tr, p);
    heisenberg_check(run, tr, p);
  }
  for (const auto& o : table.orderings)
    run.check("ordering:" + o.claim, o.holds, "worst margin " + sci(o.worst_margin));

  if (cfg.scenario == "dispersion-compare") {
    std::vector<std::string> head = {"model"};
    for (const auto& c : table.columns) head.push_back("max_rel_dev:" + c.label + "[1]");
    auto cmp = run.csv("comparison.csv", head);
    for (std::size_t i = 0; i < table.columns.size(); ++i) cmp.row(table.columns[i].label, table.max_relative_deviation[i]);
  }
}

// ---------------------------------------------------------------------------

PotentialSpec make_potential(const std::string& kind, double k4, const PhysicalParams& p) {
  if (kind == "linear") return PotentialSpec::linear(p.force());
  if (p.force() != 0.0) throw ConfigError("params.force is only used by the linear potential");
  if (kind == "harmonic") {
    if (!(p.omega0() > 0.0)) throw ConfigError("harmonic potential needs params.omega0 > 0");
    return PotentialSpec::harmonic(p.omega0());
  }
  if (kind == "quartic") return PotentialSpec::quartic(k4);
  return PotentialSpec::free();
}

bool quantum_model(PdeModel m) {
  return m == PdeModel::QuantumZeroT_Telegraph || m == PdeModel::QuantumZeroT_Smoluchowski;
}

void run_pde(Run& run) {
  const auto& cfg = run.cfg;
  const auto& p = cfg.params;
  const auto model = *pde_model_from_string(cfg.text("pde.model"));
  const bool cold = quantum_model(model);
  if (cold && !p.zero_temperature()) throw ConfigError("quantum-zero-T models need params.temperature = 0");
  if (!cold && p.zero_temperature()) throw ConfigError(cfg.text("pde.model") + " needs params.temperature > 0");
  if (p.vacuum()) throw ConfigError("PDE models need params.friction > 0");
  const auto U = make_potential(cfg.text("pde.potential"), cfg.number("pde.k4"), p);
  const double s02 = cfg.number("init.sigma2_0");
  if (!(s02 > 0.0)) throw ConfigError("init.sigma2_0 must be positive for PDE scenarios");
  const double mu0 = cfg.number("init.mu0");
  const double T = cfg.number("pde.t_final");
  const double b = p.friction(), m = p.mass(), tau = m / b, kT = p.thermal_energy();
  const bool telegraph = is_telegraph(model);

  // Reference width and mean where a closed form exists.
  std::function<double(double)> ref_s2, ref_mu;
  const auto kind = U.kind();
  if (kind == PotentialSpec::Kind::Free || kind == PotentialSpec::Kind::Linear) {
    const double f = kind == PotentialSpec::Kind::Linear ? p.force() : 0.0;
    auto ramp = [=](double t) { return telegraph ? t - tau * (1.0 - std::exp(-t / tau)) : t; };
    ref_mu = [=](double t) { return mu0 + f / b * ramp(t); };
    if (cold) {
      if (!telegraph)
        ref_s2 = [=, &p](double t) { return std::sqrt(s02 * s02 + p.hbar() * p.hbar() * t / (m * b)); };
    } else {
      ref_s2 = [=](double t) { return s02 + 2.0 * kT / b * ramp(t); };
    }
  } else if (kind == PotentialSpec::Kind::Harmonic && !telegraph && !cold) {
    double k = m * p.omega0() * p.omega0();
    if (model == PdeModel::SemiclassicalSmoluchowski) {
      const double x = p.beta() * p.hbar() * p.omega0();
      k *= 1.0 - x * x / 12.0;
    }
    const double eq = kT / k, rate = 2.0 * k / b;
    ref_s2 = [=](double t) { return eq + (s02 - eq) * std::exp(-rate * t); };
    ref_mu = [=](double t) { return mu0 * std::exp(-0.5 * rate * t); };
  }

  double x_min, x_max;
  if (cfg.is_auto("pde.x_min") || cfg.is_auto("pde.x_max")) {
    double s2_max = s02, mu_lo = mu0, mu_hi = mu0;
    if (ref_s2) s2_max = std::max({s2_max, ref_s2(T)});
    else if (!cold) s2_max = s02 + 2.0 * kT * T / b;
    else s2_max = std::sqrt(s02 * s02 + p.hbar() * p.hbar() * T / (m * b));
    if (ref_mu) {
      mu_lo = std::min(mu0, ref_mu(T));
      mu_hi = std::max(mu0, ref_mu(T));
    }
    if (kind == PotentialSpec::Kind::Harmonic) s2_max = std::max(s2_max, kT / (m * p.omega0() * p.omega0()));
    const double L = 12.0 * std::sqrt(s2_max);
    x_min = cfg.is_auto("pde.x_min") ? mu_lo - L : cfg.number("pde.x_min");
    x_max = cfg.is_auto("pde.x_max") ? mu_hi + L : cfg.number("pde.x_max");
  } else {
    x_min = cfg.number("pde.x_min");
    x_max = cfg.number("pde.x_max");
  }
  if (!(x_max > x_min)) throw ConfigError("pde.x_max must exceed pde.x_min");
  int n;
  if (cfg.is_auto("pde.n")) {
    const double h = std::sqrt(s02) / 10.0;
    const double count = std::ceil((x_max - x_min) / h) + 1.0;
    if (count > 20001.0) throw ConfigError("automatic grid needs more than 20001 nodes; set pde.n explicitly");
    n = std::max(16, static_cast<int>(count));
  } else {
    n = static_cast<int>(cfg.integer("pde.n"));
  }
  const Grid1D grid(x_min, x_max, n);

  EvolveConfig ec;
  ec.t_final = T;
  ec.dt = cfg.is_auto("pde.dt") ? 0.0 : cfg.number("pde.dt");
  ec.boundary = cfg.text("pde.boundary") == "periodic" ? Boundary::Periodic : Boundary::Reflecting;
  ec.records = static_cast<int>(cfg.integer("pde.records"));
  ec.floor_fraction = cfg.number("pde.floor");
  ec.ankerhold_flux = cfg.flag("pde.ankerhold");

  const auto rho0 = DensityField::gaussian(grid, mu0, s02);
  const auto res = evolve(rho0, model, U, p, ec);

  run.setting("pde.model", std::string(to_string(model)));
  run.setting("pde.potential", std::string(to_string(kind)));
  run.setting("pde.x_min", x_min);
  run.setting("pde.x_max", x_max);
  run.setting("pde.n", static_cast<double>(n));
  run.setting("pde.h", grid.h());
  run.setting("pde.dt", res.dt);
  run.setting("pde.stable_dt", stable_dt(model, U, p, grid));
  run.setting("pde.steps", static_cast<double>(res.steps));
  run.setting("pde.boundary", cfg.text("pde.boundary"));
  run.setting("pde.floor_fraction", ec.floor_fraction);
  run.setting("pde.max_floored_fraction", res.max_floored_fraction);

  std::vector<std::string> cols = {"t[time]", "mu[length]", "sigma_x2[length^2]", "norm[1]", "sigma_p2[momentum^2]"};
  if (ref_mu) cols.push_back("mu_reference[length]");
  if (ref_s2) cols.push_back("sigma_x2_reference[length^2]");
  auto out = run.csv("trajectory.csv", cols);
  double worst_mu = 0.0, worst_s2 = 0.0;
  const bool periodic = ec.boundary == Boundary::Periodic;
  for (const auto& mo : res.moments) {
    std::vector<double> row = {mo.t, mo.mean, mo.dispersion, mo.norm, momentum_dispersion(mo.dispersion, p)};
    if (ref_mu) {
      row.push_back(ref_mu(mo.t));
      if (mo.t > 0.0 && std::abs(ref_mu(mo.t)) > 0.0) worst_mu = std::max(worst_mu, rel(mo.mean, ref_mu(mo.t)));
    }
    if (ref_s2) {
      row.push_back(ref_s2(mo.t));
      if (mo.t > 0.0) worst_s2 = std::max(worst_s2, rel(mo.dispersion, ref_s2(mo.t)));
    }
    out.row(row);
  }

  auto write_density = [&](const std::string& file, const DensityField& d) {
    std::vector<std::string> head = {"x[length]", "rho[1/length]"};
    std::vector<double> Q;
    if (cold || model == PdeModel::SemiclassicalTelegraph || model == PdeModel::SemiclassicalSmoluchowski) {
      Q = quantum_potential(d, p, ec.floor_fraction, periodic).Q;
      head.push_back("Q[energy]");
    }
    auto dens = run.csv(file, head);
    for (int i = 0; i < grid.n(); ++i) {
      std::vector<double> row = {grid.x(i), d.rho[i]};
      if (!Q.empty()) row.push_back(Q[i]);
      dens.row(row);
    }
  };
  write_density("density_initial.csv", rho0);
  write_density("density_final.csv", res.final_density);

  const double drift_tol = 1e-10 * std::max(1.0, static_cast<double>(res.steps) / 1000.0);
  run.check("mass-conservation", res.max_mass_drift <= drift_tol,
            "max drift " + sci(res.max_mass_drift) + " over " + std::to_string(res.steps) + " steps (tol " +
                sci(drift_tol) + ")");
  if (ref_mu && worst_mu > 0.0) run.info("mean-reference", "max rel. deviation " + sci(worst_mu));
  if (ref_s2) run.info("width-reference", "max rel. deviation " + sci(worst_s2));
}

// ---------------------------------------------------------------------------

void run_equilibrium(Run& run) {
  const auto& cfg = run.cfg;
  const auto& p = cfg.params;
  const double beta = p.beta();
  const auto U = make_potential(cfg.text("eq.potential"), cfg.number("eq.k4"), p);
  const bool periodic = cfg.text("eq.boundary") == "periodic";

  double x_min, x_max;
  if (cfg.is_auto("eq.x_min") || cfg.is_auto("eq.x_max")) {
    double sigma;
    if (U.kind() == PotentialSpec::Kind::Harmonic) {
      sigma = std::sqrt(harmonic_equilibrium_dispersion(beta, p));
    } else if (U.kind() == PotentialSpec::Kind::Quartic) {
      const double k4 = U.k4();
      const double classical = std::pow(beta * k4, -0.25);
      const double ground = std::pow(p.hbar() * p.hbar() / (p.mass() * k4), 1.0 / 6.0);
      sigma = std::max(classical, ground) / 1.5;
    } else {
      throw ConfigError("eq.x_min and eq.x_max must be given for the free potential");
    }
    const double L = 12.0 * sigma;
    x_min = cfg.is_auto("eq.x_min") ? -L : cfg.number("eq.x_min");
    x_max = cfg.is_auto("eq.x_max") ? L : cfg.number("eq.x_max");
  } else {
    x_min = cfg.number("eq.x_min");
    x_max = cfg.number("eq.x_max");
  }
  if (!(x_max > x_min)) throw ConfigError("eq.x_max must exceed eq.x_min");
  const Grid1D grid(x_min, x_max, static_cast<int>(cfg.integer("eq.n")));
  const int steps = static_cast<int>(cfg.integer("eq.beta_steps"));
  const Boundary boundary = periodic ? Boundary::Periodic : Boundary::Reflecting;

  // Imaginary-time densities on the entropy nodes; the last one is the result.
  const int ne = static_cast<int>(cfg.integer("eq.entropy_nodes"));
  std::vector<double> bnodes(ne);
  for (int k = 0; k < ne; ++k) bnodes[k] = k == ne - 1 ? beta : beta * k / (ne - 1);
  std::vector<std::optional<EquilibriumDensity>> path(ne);
  detail::parallel_for(static_cast<std::size_t>(ne - 1), run.opt.jobs, [&](std::size_t i) {
    const int k = static_cast<int>(i) + 1;
    const int s = std::max(16, static_cast<int>(std::lround(static_cast<double>(steps) * k / (ne - 1))));
    path[k] = imaginary_time_density(U, p.with_beta(bnodes[k]), {bnodes[k], s, grid, true, boundary});
  });
  const auto& it = *path.back();
  std::vector<DensityField> rhos = {DensityField::uniform(grid)};
  for (int k = 1; k < ne; ++k) rhos.push_back(path[k]->density);
  const auto S = quantum_entropy(rhos, bnodes, p);
  const auto Q = quantum_potential(it.density, p, 1e-12, periodic).Q;

  run.setting("eq.x_min", x_min);
  run.setting("eq.x_max", x_max);
  run.setting("eq.n", static_cast<double>(grid.n()));
  run.setting("eq.beta", beta);
  run.setting("eq.beta_steps", static_cast<double>(steps));
  run.setting("eq.entropy_nodes", static_cast<double>(ne));
  run.setting("eq.boundary", cfg.text("eq.boundary"));

  {
    auto out = run.csv("density_imaginary_time.csv",
                       {"x[length]", "rho[1/length]", "Q[energy]", "S_Q[energy/temperature]"});
    for (int i = 0; i < grid.n(); ++i) out.row({grid.x(i), it.density.rho[i], Q[i], S[i]});
  }
  const auto s_it = moments(it.density).dispersion;
  std::string summary = "imaginary-time sigma_x2 " + num(s_it) + ", Z " + num(it.Z);

  if (!periodic) {
    const auto eig = eigen_density(U, p, beta, grid, static_cast<int>(cfg.integer("eq.n_states")));
    run.setting("eq.n_states", static_cast<double>(eig.spectrum.count()));
    run.setting("eq.tail_weight", eig.tail_weight);
    auto out = run.csv("density_eigen.csv", {"x[length]", "rho[1/length]"});
    double d = 0.0;
    for (int i = 0; i < grid.n(); ++i) {
      out.row({grid.x(i), eig.density.rho[i]});
      d = std::max(d, std::abs(eig.density.rho[i] - it.density.rho[i]));
    }
    if (eig.warning) run.info("eigen-tail", *eig.warning);
    run.info("imaginary-time-vs-eigen", "max |drho| " + sci(d) + ", Z " + num(it.Z) + " vs " + num(eig.Z));
    summary += "; eigen sigma_x2 " + num(moments(eig.density).dispersion);
  } else {
    run.info("eigen-route", "skipped: the eigen expansion uses reflecting walls");
  }

  try {
    const auto sc = semiclassical_density(U, p, beta, grid);
    auto out = run.csv("density_semiclassical.csv", {"x[length]", "rho[1/length]"});
    double d = 0.0;
    for (int i = 0; i < grid.n(); ++i) {
      out.row({grid.x(i), sc.rho[i]});
      d = std::max(d, std::abs(sc.rho[i] - it.density.rho[i]));
    }
    run.info("semiclassical-vs-imaginary-time", "max |drho| " + sci(d));
    summary += "; semiclassical sigma_x2 " + num(moments(sc).dispersion);
  } catch (const Error& e) {
    run.info("semiclassical-route", std::string("unavailable: ") + e.what());
  }
  if (U.kind() == PotentialSpec::Kind::Harmonic)
    summary += "; (hbar/2m omega0) coth " + num(harmonic_equilibrium_dispersion(beta, p));
  run.info("dispersions", summary);
}

void run_acceptance_scenario(Run& run) {
  const bool quick = run.cfg.flag("acceptance.quick");
  const auto results = run_acceptance(quick, run.opt.jobs);
  std::ofstream out(fs::path(run.opt.out_dir) / "acceptance.txt");
  run.files.push_back("acceptance.txt");
  for (const auto& r : results) {
    const auto line = format_verdict(r);
    std::cout << line << '\n';
    out << line << '\n';
    const std::string name = "criterion-" + std::to_string(r.id);
    if (r.skipped) run.info(name, "skipped");
    else run.check(name, r.pass, r.name);
  }
}

// ---------------------------------------------------------------------------

void write_manifest(const Run& run, const RunOutcome& outcome, double seconds) {
  std::ofstream m(fs::path(run.opt.out_dir) / "manifest.txt");
  m << "# qbrown run manifest\n\n[config]\n";
  for (const auto& [key, v] : run.cfg.values)
    m << key << " = " << v.text << (v.line == 0 ? "  # default" : "") << '\n';
  m << "\n[scales]\n" << describe_scales(run.cfg.params);
  m << "\n[solver]\n";
  for (const auto& [k, v] : run.solver) m << k << " = " << v << '\n';
  m << "\n[checks]\n";
  for (const auto& c : run.checks) m << c.verdict << ' ' << c.name << ": " << c.detail << '\n';
  m << "\n[files]\n";
  for (const auto& f : run.files) m << f << '\n';
  m << "\n[run]\n";
  m << "wall_time_s = " << sci(seconds) << '\n';
  m << "exit_code = " << outcome.exit_code << '\n';
  m << "cause = " << (outcome.cause.empty() ? "none" : outcome.cause) << '\n';
}

}  // namespace

std::string describe_scales(const PhysicalParams& p) {
  std::ostringstream os;
  os << "hbar = " << num(p.hbar()) << "\nk_B = " << num(p.k_B()) << "\nmass = " << num(p.mass())
     << "\nfriction = " << num(p.friction()) << "\ntemperature = " << num(p.temperature())
     << "\nomega0 = " << num(p.omega0()) << "\nforce = " << num(p.force()) << '\n';
  if (p.zero_temperature() || p.vacuum()) {
    os << "# lambda_T, D, t_c undefined at " << (p.zero_temperature() ? "T = 0" : "b = 0") << '\n';
    if (!p.vacuum()) os << "tau_m = " << num(p.mass() / p.friction()) << '\n';
    return os.str();
  }
  const auto s = derived_scales(p);
  os << "lambda_T = " << num(s.lambda_T) << "\nD = " << num(s.D) << "\nt_c = " << num(s.t_c)
     << "\ntau_m = " << num(s.tau_m) << "\noverdamped_quantum_regime = "
     << (s.overdamped_quantum_regime() ? "true" : "false") << '\n';
  return os.str();
}

RunOutcome run_scenario(const ScenarioConfig& cfg, const RunOptions& opt) {
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) return {2, "cannot create output directory '" + opt.out_dir + "': " + ec.message(), {}};

  const auto start = std::chrono::steady_clock::now();
  Run run(cfg, opt);
  RunOutcome outcome;
  try {
    const auto& s = cfg.scenario;
    if (s == "free-zero-T" || s == "vacuum-spreading") run_inertial(run);
    else if (s == "harmonic") run_harmonic(run);
    else if (s == "free-high-friction" || s == "dispersion-compare") run_comparison(run);
    else if (s == "classical-telegraph" || s == "quantum-zero-T-pde" || s == "semiclassical-pde") run_pde(run);
    else if (s == "equilibrium") run_equilibrium(run);
    else if (s == "acceptance") run_acceptance_scenario(run);
    else throw ConfigError("unknown scenario '" + s + "'");
    for (const auto& c : run.checks)
      if (c.verdict == "FAIL") {
        outcome.exit_code = 1;
        outcome.cause = "check failed: " + c.name;
        break;
      }
  } catch (const ConfigError& e) {
    outcome = {2, e.what(), {}};
  } catch (const ValidationError& e) {
    outcome = {2, e.what(), {}};
  } catch (const DomainError& e) {
    outcome = {2, e.what(), {}};
  } catch (const std::exception& e) {
    outcome = {1, e.what(), {}};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run.files.push_back("manifest.txt");
  write_manifest(run, outcome, seconds);
  outcome.files = run.files;
  return outcome;
}

}  // namespace qbrown
