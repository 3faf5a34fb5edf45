// Command-line driver: validate, asymptotics, solve, converge, kernel-check.
//
// Exit codes: 0 success, 1 validation or domain failure, 2 usage error,
// 3 numerical abort.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hsflow/hsflow.hpp"

namespace fs = std::filesystem;
using namespace hsflow;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kUsage = 2;
constexpr int kAbort = 3;

struct Overrides {
  std::string config_path;
  std::vector<double> eps;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::string output_dir;
};

ExperimentConfig load(const Overrides& o) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (!o.eps.empty()) c.eps = o.eps;
  if (o.n1) c.grid.n1 = o.n1;
  if (o.n2) c.grid.n2 = o.n2;
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  c.validate();
  fs::create_directories(c.output_dir);
  return c;
}

std::string out_path(const ExperimentConfig& c, const std::string& name) {
  return (fs::path(c.output_dir) / name).string();
}

std::string eps_tag(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "eps%g", e);
  return buf;
}

int cmd_validate(const ExperimentConfig& c) {
  const auto flux = c.make_flux_data();
  CsvWriter w(out_path(c, "validate.csv"), c,
              {"eps", "necessary_integral_min", "top_slope_max", "top_slope_tail_bound",
               "monotone_growth_min", "verdict", "indeterminate"});
  bool all = true;
  for (double e : c.eps) {
    WellPosednessOptions opt;
    opt.M = c.grid.M;
    opt.samples = c.grid.series_samples;
    const auto r = validate_wellposedness(flux, e, opt);
    w.row({num(e), num(r.necessary_integral_min), num(r.top_slope_max), num(r.top_slope_tail_bound),
           num(r.monotone_growth_min), flag(r.verdict), flag(r.indeterminate)});
    std::printf("eps=%g necessary_integral_min=%.6e top_slope_max=%.6e monotone_growth_min=%.6e verdict=%s%s\n",
                e, r.necessary_integral_min, r.top_slope_max, r.monotone_growth_min,
                r.verdict ? "ok" : "FAIL", r.indeterminate ? " (indeterminate)" : "");
    all = all && r.verdict;
  }
  return all ? kOk : kValidation;
}

int cmd_asymptotics(const ExperimentConfig& c) {
  auto evo = make_evolution(c);
  const auto times = output_times(c);
  {
    CsvWriter w(out_path(c, "asymptotic_S.csv"), c, {"t", "y1", "S", "S_t", "S_y1"});
    for (double t : times) {
      for (double y : quad::uniform_grid(0.0, c.l, 128)) {
        w.row({num(t), num(y), num(evo->S(y, t)), num(evo->S_t(y, t)), num(evo->S_y1(y, t))});
      }
    }
  }
  for (double e : c.eps) {
    const auto a = make_approximation(c, evo, e);
    CsvWriter wp(out_path(c, "profile_" + eps_tag(e) + ".csv"), c, {"t", "y1", "w0", "w0_prime", "w0_second"});
    CsvWriter wu(out_path(c, "corrector_" + eps_tag(e) + ".csv"), c, {"t", "y1", "xi2", "u2"});
    CsvWriter wl(out_path(c, "layers_" + eps_tag(e) + ".csv"), c, {"t", "side", "m", "a_m"});
    const std::size_t stride = std::max<std::size_t>(1, c.grid.profile_intervals / 128);
    for (std::size_t k = 0; k < a.times().size(); ++k) {
      const auto& p = a.profiles()[k];
      const auto& u = a.correctors()[k];
      for (std::size_t i = 0; i < p.y1_grid.size(); i += stride) {
        wp.row({num(p.t), num(p.y1_grid[i]), num(p.w0_values[i]), num(p.w0_prime_values[i]),
                num(p.w0_second_values[i])});
        for (std::size_t j = 0; j < u.n_xi; ++j) {
          const double xi = u.S_values[i] * static_cast<double>(j) / static_cast<double>(u.n_xi - 1);
          wu.row({num(u.t), num(u.y1_grid[i]), num(xi), num(u.u2_values[i * u.n_xi + j])});
        }
      }
      if (k < a.layers().size()) {
        const auto& [left, right] = a.layers()[k];
        for (std::size_t m = 0; m < left.coefficients.size(); ++m) {
          wl.row({num(p.t), "left", num(m), num(left.coefficients[m])});
          wl.row({num(p.t), "right", num(m), num(right.coefficients[m])});
        }
      }
    }
    std::printf("eps=%g: %zu time nodes written\n", e, a.times().size());
  }
  return kOk;
}

int cmd_solve(const ExperimentConfig& c, std::size_t pressure_stride) {
  int status = kOk;
  for (double e : c.eps) {
    auto [traj, completed] = run_trajectory(c, e);
    CsvWriter ws(out_path(c, "trajectory_" + eps_tag(e) + ".csv"), c, {"t", "y1", "S", "S_t"});
    CsvWriter wp(out_path(c, "pressure_" + eps_tag(e) + ".csv"), c, {"t", "y1", "eta", "p"});
    for (const auto& snap : traj.snapshots) {
      for (std::size_t i = 0; i < snap.state.size(); ++i) {
        ws.row({num(snap.t), num(snap.state.y1_grid[i]), num(snap.state.S_values[i]), num(snap.velocity[i])});
      }
      const auto& g = snap.grid;
      for (std::size_t i = 0; i <= g.n1; i += pressure_stride) {
        for (std::size_t j = 0; j <= g.n2; ++j) wp.row({num(g.t), num(g.y1(i)), num(g.eta(j)), num(g.at(i, j))});
      }
    }
    std::printf("eps=%g: %s at t=%g after %zu steps\n", e, completed ? "completed" : "ABORTED (|S-1| >= 1/5)",
                traj.back().t, traj.steps);
    if (!completed) status = kAbort;
  }
  return status;
}

int cmd_converge(const ExperimentConfig& c) {
  if (c.eps.size() < 3) {
    std::fprintf(stderr, "converge: insufficient data (need at least 3 eps values)\n");
    return kValidation;
  }
  const auto s = run_sweep(c);
  {
    CsvWriter w(out_path(c, "sweep.csv"), c,
                {"eps", "n1", "n2", "completed", "t_end", "sup_t_H1", "sup_t_L2_mid", "mass_rel_error_max",
                 "angle_ref_max", "poincare_max", "R1_over_eps2", "R2_over_eps3", "top_slope_max", "a0_max"});
    for (const auto& r : s.runs) {
      w.row({num(r.eps), num(r.n1), num(r.n2), flag(r.completed), num(r.t_end), num(r.record.sup_t_H1),
             num(r.record.sup_t_L2_mid), num(r.mass_rel_error_max), num(r.angle_ref_max), num(r.poincare_max),
             num(r.R1_scaled), num(r.R2_scaled), num(r.top_slope_max), num(r.a0_max)});
    }
  }
  {
    CsvWriter w(out_path(c, "errors_by_t.csv"), c, {"eps", "t", "H1", "L2_mid", "mass_rel_error"});
    for (const auto& r : s.runs) {
      for (std::size_t k = 0; k < r.record.times.size(); ++k) {
        w.row({num(r.eps), num(r.record.times[k]), num(r.record.h1_by_t[k]), num(r.record.mid_by_t[k]),
               num(r.mass_rel_error[k])});
      }
    }
  }
  CsvWriter w(out_path(c, "fits.csv"), c, {"metric", "slope", "intercept", "r_squared", "points"});
  for (const auto& r : s.runs) {
    std::printf("eps=%g n1=%zu n2=%zu H1=%.6e mid=%.6e%s\n", r.eps, r.n1, r.n2, r.record.sup_t_H1,
                r.record.sup_t_L2_mid, r.completed ? "" : " (partial: aborted)");
  }
  if (!s.h1_fit) {
    std::fprintf(stderr, "converge: %s\n", s.fit_error.c_str());
    return kValidation;
  }
  for (const auto& [name, f] : {std::pair{"H1", *s.h1_fit}, std::pair{"mid", *s.mid_fit}}) {
    w.row({name, num(f.slope), num(f.intercept), num(f.r_squared), num(f.eps_list.size())});
    std::printf("%s slope=%.4f r2=%.4f\n", name, f.slope, f.r_squared);
  }
  for (const auto& r : s.runs) {
    if (!r.completed) return kAbort;
  }
  return kOk;
}

int cmd_kernel_check(const ExperimentConfig& c) {
  CsvWriter w(out_path(c, "kernel_identity.csv"), c, {"C0", "t", "k", "computed", "expected", "abs_error"});
  for (double c0 : c.kernel.C0) {
    const spectral::SmoothingKernel K(c0);
    for (double t : c.kernel.t) {
      for (int k : {0, 1}) {
        const double v = spectral::kernel_identity_check(K, t, k);
        const double ex = k == 0 ? 2.0 * std::numbers::pi * t : 0.0;
        w.row({num(c0), num(t), num(k), num(v), num(ex), num(std::abs(v - ex))});
        std::printf("C0=%g t=%g k=%d integral=%.12f expected=%.12f\n", c0, t, k, v, ex);
      }
    }
  }
  CsvWriter wb(out_path(c, "kernel_bounds.csv"), c, {"C0", "t", "d", "alpha", "ratio_t", "ratio_near", "ratio_far"});
  for (double c0 : c.kernel.C0) {
    const spectral::SmoothingKernel K(c0);
    for (double t : c.kernel.t) {
      for (double d : c.kernel.d) {
        const auto s = spectral::kernel_bound_sample(K, t, d, c.kernel.alpha);
        wb.row({num(c0), num(t), num(d), num(s.alpha), num(s.ratio_t), num(s.ratio_near), num(s.ratio_far)});
      }
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thin-strip Hele-Shaw laboratory: asymptotics, reference solver, convergence sweeps"};
  app.require_subcommand(1);
  Overrides o;
  auto add_common = [&](CLI::App* s) {
    s->add_option("-c,--config", o.config_path, "JSON config file (defaults built in when omitted)");
    s->add_option("--eps", o.eps, "override the eps list");
    s->add_option("--n1", o.n1, "override grid.n1");
    s->add_option("--n2", o.n2, "override grid.n2");
    s->add_option("-o,--output-dir", o.output_dir, "override output_dir");
  };
  auto* validate = app.add_subcommand("validate", "check the well-posedness conditions for each eps");
  auto* asym = app.add_subcommand("asymptotics", "tabulate S, the limit profile, the corrector and layer coefficients");
  auto* solve = app.add_subcommand("solve", "run the reference free-boundary solver");
  auto* converge = app.add_subcommand("converge", "eps sweep: error norms and fitted rates");
  auto* kernel = app.add_subcommand("kernel-check", "kernel identities and weighted bound scans");
  auto* dump = app.add_subcommand("dump-config", "print the effective config as JSON");
  std::size_t stride = 1;
  solve->add_option("--pressure-stride", stride, "write every k-th pressure column")->check(CLI::PositiveNumber);
  for (auto* s : {validate, asym, solve, converge, kernel, dump}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  ExperimentConfig cfg;
  try {
    cfg = load(o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid config: %s\n", e.what());
    return kValidation;
  }

  try {
    if (*dump) {
      std::cout << dump_config(cfg);
      return kOk;
    }
    if (*validate) return cmd_validate(cfg);
    if (*asym) return cmd_asymptotics(cfg);
    if (*solve) return cmd_solve(cfg, stride);
    if (*converge) return cmd_converge(cfg);
    if (*kernel) return cmd_kernel_check(cfg);
  } catch (const InvalidParameter& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const SolvabilityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kAbort;
  }
  return kOk;
}
