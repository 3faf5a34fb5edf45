#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hsflow/errors.hpp"
#include "hsflow/presets.hpp"
#include "hsflow/reference_solver.hpp"

namespace hsflow {

inline constexpr const char* kVersion = "1.0.0";

/// Raised for unreadable or malformed configuration files (usage errors).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridConfig {
  std::size_t n1 = 64;
  std::size_t n2 = 32;
  /// "fixed" or "inverse_eps": n1(eps) = round(n1 * max(eps list) / eps)
  std::string n1_scaling = "inverse_eps";
  std::size_t time_nodes = 64;
  int M = 64;
  std::size_t profile_intervals = 512;
  std::size_t series_samples = 4097;

  bool operator==(const GridConfig&) const = default;
};

struct ToleranceConfig {
  double tail = 1e-6;
  double right_bc = 1e-8;
  double top_slope = 1e-6;
  double a0 = 1e-10;

  bool operator==(const ToleranceConfig&) const = default;
};

struct KernelConfig {
  std::vector<double> C0 = {0.5, 1.0, 3.0};
  std::vector<double> t = {0.5, 1.0, 2.0};
  double alpha = 0.5;
  std::vector<double> d = {0.01, 0.1, 1.0};

  bool operator==(const KernelConfig&) const = default;
};

struct ExperimentConfig {
  FluxPreset flux = default_preset();
  double gamma = 1.0;
  double l = 1.0;
  double T = 0.25;
  std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};
  GridConfig grid;
  solver::SolverConfig solver;
  ToleranceConfig tolerances;
  KernelConfig kernel;
  int layer_modes = 32;
  std::string output_dir = "out";

  double eps_max() const {
    double m = 0.0;
    for (double e : eps) m = std::max(m, e);
    return m;
  }
  std::size_t n1_for(double e) const {
    if (grid.n1_scaling == "fixed") return grid.n1;
    return static_cast<std::size_t>(std::lround(static_cast<double>(grid.n1) * eps_max() / e));
  }
  solver::SolverConfig solver_for(double e) const {
    auto s = solver;
    s.n1 = n1_for(e);
    s.n2 = grid.n2;
    return s;
  }
  BoundaryFluxData make_flux_data() const { return make_flux(flux, gamma, l, T); }

  void validate() const {
    if (!is_known_family(flux.family)) throw InvalidParameter("config: unknown flux family '" + flux.family + "'");
    if (!(gamma > 0.0) || !(l > 0.0) || !(T > 0.0)) throw InvalidParameter("config: gamma, l, T must be positive");
    if (eps.empty()) throw InvalidParameter("config: eps list is empty");
    for (double e : eps) {
      if (!(e > 0.0)) throw InvalidParameter("config: eps values must be positive");
    }
    if (grid.n1_scaling != "fixed" && grid.n1_scaling != "inverse_eps") {
      throw InvalidParameter("config: grid.n1_scaling must be 'fixed' or 'inverse_eps'");
    }
    if (grid.time_nodes < 2) throw InvalidParameter("config: grid.time_nodes must be >= 2");
    if (grid.M < 8) throw InvalidParameter("config: grid.M must be >= 8");
    if (grid.profile_intervals < 4) throw InvalidParameter("config: grid.profile_intervals must be >= 4");
    if (grid.series_samples < 4 * static_cast<std::size_t>(grid.M)) {
      throw InvalidParameter("config: grid.series_samples must be >= 4 M");
    }
    for (double e : eps) solver_for(e).validate();
    if (!(tolerances.tail > 0 && tolerances.right_bc > 0 && tolerances.top_slope > 0 && tolerances.a0 > 0)) {
      throw InvalidParameter("config: tolerances must be positive");
    }
    for (double c : kernel.C0) {
      if (!(c > 0.0)) throw InvalidParameter("config: kernel.C0 values must be positive");
    }
    for (double t : kernel.t) {
      if (!(t > 0.0)) throw InvalidParameter("config: kernel.t values must be positive");
    }
    for (double d : kernel.d) {
      if (!(d > 0.0)) throw InvalidParameter("config: kernel.d values must be positive");
    }
    if (!(kernel.alpha > 0.0 && kernel.alpha < 1.0)) throw InvalidParameter("config: kernel.alpha must be in (0, 1)");
    if (layer_modes < 0) throw InvalidParameter("config: layer_modes must be >= 0");
  }

  bool operator==(const ExperimentConfig& o) const {
    auto same_solver = [](const solver::SolverConfig& a, const solver::SolverConfig& b) {
      return a.dt_safety == b.dt_safety && a.linear_tolerance == b.linear_tolerance &&
             a.time_integrator == b.time_integrator && a.reuse_factorization == b.reuse_factorization;
    };
    return flux == o.flux && gamma == o.gamma && l == o.l && T == o.T && eps == o.eps && grid == o.grid &&
           same_solver(solver, o.solver) && tolerances == o.tolerances && kernel == o.kernel &&
           layer_modes == o.layer_modes && output_dir == o.output_dir;
  }
};

namespace config_detail {

using nlohmann::json;

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (!allowed.count(k)) throw ConfigError("config: unknown key '" + k + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config: bad value for '" + where + "." + key + "': " + e.what());
  }
}

}  // namespace config_detail

inline nlohmann::json to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json j;
  j["flux"] = {{"family", c.flux.family}, {"a1", c.flux.a1}, {"a2", c.flux.a2}, {"a3", c.flux.a3},
               {"beta", c.flux.beta},     {"omega", c.flux.omega}, {"b", c.flux.b}};
  j["gamma"] = c.gamma;
  j["l"] = c.l;
  j["T"] = c.T;
  j["eps"] = c.eps;
  j["grid"] = {{"n1", c.grid.n1},
               {"n2", c.grid.n2},
               {"n1_scaling", c.grid.n1_scaling},
               {"time_nodes", c.grid.time_nodes},
               {"M", c.grid.M},
               {"profile_intervals", c.grid.profile_intervals},
               {"series_samples", c.grid.series_samples}};
  j["solver"] = {{"dt_safety", c.solver.dt_safety},
                 {"linear_tolerance", c.solver.linear_tolerance},
                 {"time_integrator", solver::to_string(c.solver.time_integrator)},
                 {"reuse_factorization", c.solver.reuse_factorization}};
  j["tolerances"] = {{"tail", c.tolerances.tail},
                     {"right_bc", c.tolerances.right_bc},
                     {"top_slope", c.tolerances.top_slope},
                     {"a0", c.tolerances.a0}};
  j["kernel"] = {{"C0", c.kernel.C0}, {"t", c.kernel.t}, {"alpha", c.kernel.alpha}, {"d", c.kernel.d}};
  j["layer_modes"] = c.layer_modes;
  j["output_dir"] = c.output_dir;
  return j;
}

/// Parses and validates a config. Unknown keys and type mismatches raise
/// ConfigError; values that parse but violate constraints raise InvalidParameter.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  using namespace config_detail;
  ExperimentConfig c;
  reject_unknown(j,
                 {"flux", "gamma", "l", "T", "eps", "grid", "solver", "tolerances", "kernel", "layer_modes",
                  "output_dir"},
                 "root");
  if (j.contains("flux")) {
    const auto& f = j.at("flux");
    reject_unknown(f, {"family", "a1", "a2", "a3", "beta", "omega", "b"}, "flux");
    read(f, "family", c.flux.family, "flux");
    read(f, "a1", c.flux.a1, "flux");
    read(f, "a2", c.flux.a2, "flux");
    read(f, "a3", c.flux.a3, "flux");
    read(f, "beta", c.flux.beta, "flux");
    read(f, "omega", c.flux.omega, "flux");
    read(f, "b", c.flux.b, "flux");
  }
  read(j, "gamma", c.gamma, "root");
  read(j, "l", c.l, "root");
  read(j, "T", c.T, "root");
  read(j, "eps", c.eps, "root");
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    reject_unknown(g, {"n1", "n2", "n1_scaling", "time_nodes", "M", "profile_intervals", "series_samples"}, "grid");
    read(g, "n1", c.grid.n1, "grid");
    read(g, "n2", c.grid.n2, "grid");
    read(g, "n1_scaling", c.grid.n1_scaling, "grid");
    read(g, "time_nodes", c.grid.time_nodes, "grid");
    read(g, "M", c.grid.M, "grid");
    read(g, "profile_intervals", c.grid.profile_intervals, "grid");
    read(g, "series_samples", c.grid.series_samples, "grid");
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    reject_unknown(s, {"dt_safety", "linear_tolerance", "time_integrator", "reuse_factorization"}, "solver");
    read(s, "dt_safety", c.solver.dt_safety, "solver");
    read(s, "linear_tolerance", c.solver.linear_tolerance, "solver");
    read(s, "reuse_factorization", c.solver.reuse_factorization, "solver");
    std::string ti = solver::to_string(c.solver.time_integrator);
    read(s, "time_integrator", ti, "solver");
    if (ti == "euler") {
      c.solver.time_integrator = solver::TimeIntegrator::euler;
    } else if (ti == "heun") {
      c.solver.time_integrator = solver::TimeIntegrator::heun;
    } else {
      throw InvalidParameter("config: solver.time_integrator must be 'euler' or 'heun'");
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    reject_unknown(t, {"tail", "right_bc", "top_slope", "a0"}, "tolerances");
    read(t, "tail", c.tolerances.tail, "tolerances");
    read(t, "right_bc", c.tolerances.right_bc, "tolerances");
    read(t, "top_slope", c.tolerances.top_slope, "tolerances");
    read(t, "a0", c.tolerances.a0, "tolerances");
  }
  if (j.contains("kernel")) {
    const auto& k = j.at("kernel");
    reject_unknown(k, {"C0", "t", "alpha", "d"}, "kernel");
    read(k, "C0", c.kernel.C0, "kernel");
    read(k, "t", c.kernel.t, "kernel");
    read(k, "alpha", c.kernel.alpha, "kernel");
    read(k, "d", c.kernel.d, "kernel");
  }
  read(j, "layer_modes", c.layer_modes, "root");
  read(j, "output_dir", c.output_dir, "root");
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return config_from_json(j);
}

inline std::string dump_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

/// 64-bit FNV-1a of the canonical JSON dump.
inline std::string config_hash(const ExperimentConfig& c) {
  const std::string s = to_json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hsflow
