#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "hsflow/analysis.hpp"
#include "hsflow/asymptotics.hpp"
#include "hsflow/config.hpp"
#include "hsflow/reference_solver.hpp"

namespace hsflow {

/// Everything measured for one eps of a sweep.
struct EpsilonResult {
  double eps = 0.0;
  std::size_t n1 = 0, n2 = 0;
  analysis::ErrorRecord record;
  /// |eps gamma int V dy_1 - influx| / influx per stored time
  std::vector<double> mass_rel_error;
  double mass_rel_error_max = 0.0;
  /// max |dS/dy_1| of the reference on [0, l/10] U [9l/10, l]
  double angle_ref_max = 0.0;
  /// Poincare ratio of the Gamma-mean-free error field, per time (t > 0)
  std::vector<double> poincare_by_t;
  double poincare_max = 0.0;
  /// max over t of R1_sup / eps^2 and R2_sup / eps^3
  double R1_scaled = 0.0;
  double R2_scaled = 0.0;
  double top_slope_max = 0.0;
  double a0_max = 0.0;
  std::size_t steps = 0, solves = 0;
  bool completed = true;
  double t_end = 0.0;
  std::optional<solver::Trajectory> trajectory;
};

inline std::shared_ptr<const asymptotics::FreeBoundaryEvolution> make_evolution(const ExperimentConfig& cfg) {
  return std::make_shared<const asymptotics::FreeBoundaryEvolution>(cfg.make_flux_data());
}

inline asymptotics::AsymptoticApproximation make_approximation(
    const ExperimentConfig& cfg, std::shared_ptr<const asymptotics::FreeBoundaryEvolution> evo, double eps) {
  asymptotics::ApproximationOptions opt;
  opt.time_nodes = cfg.grid.time_nodes;
  opt.profile.intervals = cfg.grid.profile_intervals;
  opt.profile.right_bc_tolerance = cfg.tolerances.right_bc;
  opt.layer_modes = cfg.layer_modes;
  return asymptotics::AsymptoticApproximation(std::move(evo), eps, opt);
}

inline std::vector<double> output_times(const ExperimentConfig& cfg) {
  return quad::uniform_grid(0.0, cfg.T, cfg.grid.time_nodes - 1);
}

/// Reference trajectory; an abort on the |S - 1| bound returns the partial run.
inline std::pair<solver::Trajectory, bool> run_trajectory(const ExperimentConfig& cfg, double eps) {
  const auto flux = cfg.make_flux_data();
  try {
    return {solver::run_reference(flux, eps, cfg.solver_for(eps), output_times(cfg)), true};
  } catch (const solver::RunAborted& a) {
    return {a.partial, false};
  }
}

inline EpsilonResult evaluate_epsilon(const ExperimentConfig& cfg, double eps, bool keep_trajectory = false) {
  const auto flux = cfg.make_flux_data();
  auto evo = make_evolution(cfg);
  const auto approx = make_approximation(cfg, evo, eps);
  auto [traj, completed] = run_trajectory(cfg, eps);

  EpsilonResult r;
  r.eps = eps;
  const auto sc = cfg.solver_for(eps);
  r.n1 = sc.n1;
  r.n2 = sc.n2;
  r.completed = completed;
  r.steps = traj.steps;
  r.solves = traj.solves;
  r.t_end = traj.back().t;
  r.record.eps = eps;
  r.record.n1 = sc.n1;
  r.record.n2 = sc.n2;
  r.record.completed = completed;

  for (const auto& snap : traj.snapshots) {
    const auto& g = snap.grid;
    const double h1 = analysis::h1_error(g, approx);
    const double mid = analysis::midvalue_error(g, approx);
    r.record.times.push_back(snap.t);
    r.record.h1_by_t.push_back(h1);
    r.record.mid_by_t.push_back(mid);
    r.record.sup_t_H1 = std::max(r.record.sup_t_H1, h1);
    r.record.sup_t_L2_mid = std::max(r.record.sup_t_L2_mid, mid);

    const auto& st = snap.state;
    const auto w = quad::simpson_weights(st.size(), st.spacing());
    double integral_v = 0.0;
    for (std::size_t i = 0; i < st.size(); ++i) integral_v += w[i] * snap.velocity[i];
    const double lhs = eps * flux.gamma * integral_v;
    const double rhs = solver::total_influx(flux, eps, st.S_values.front(), st.S_values.back(), snap.t);
    const double rel = std::abs(lhs - rhs) / std::abs(rhs);
    r.mass_rel_error.push_back(rel);
    r.mass_rel_error_max = std::max(r.mass_rel_error_max, rel);

    if (snap.t > 0.0) {
      const auto W = analysis::mean_free_error_field(g, approx);
      const auto pr = analysis::poincare_diagnostic(g, W);
      if (pr.usable()) {
        r.poincare_by_t.push_back(pr.ratio);
        r.poincare_max = std::max(r.poincare_max, pr.ratio);
      }
    }
    const auto res = analysis::residual_diagnostics(approx, snap.t);
    r.R1_scaled = std::max(r.R1_scaled, res.R1_sup / (eps * eps));
    r.R2_scaled = std::max(r.R2_scaled, res.R2_sup / (eps * eps * eps));
  }
  r.angle_ref_max = solver::angle_preservation_check(traj, flux.l / 10.0).max_slope;
  for (const auto& c : approx.correctors()) r.top_slope_max = std::max(r.top_slope_max, c.max_top_slope_residual());
  for (const auto& [a, b] : approx.layers()) {
    r.a0_max = std::max({r.a0_max, std::abs(a.coefficients[0]), std::abs(b.coefficients[0])});
  }
  if (keep_trajectory) r.trajectory = std::move(traj);
  return r;
}

struct SweepResult {
  std::vector<EpsilonResult> runs;
  std::optional<analysis::RateFit> h1_fit;
  std::optional<analysis::RateFit> mid_fit;
  std::string fit_error;
};

inline SweepResult run_sweep(const ExperimentConfig& cfg) {
  SweepResult s;
  for (double e : cfg.eps) s.runs.push_back(evaluate_epsilon(cfg, e));
  std::vector<analysis::ErrorRecord> recs;
  for (const auto& r : s.runs) recs.push_back(r.record);
  try {
    s.h1_fit = analysis::fit_rate(recs, analysis::Metric::H1);
    s.mid_fit = analysis::fit_rate(recs, analysis::Metric::mid);
  } catch (const InsufficientData& e) {
    s.fit_error = e.what();
  }
  return s;
}

}  // namespace hsflow
