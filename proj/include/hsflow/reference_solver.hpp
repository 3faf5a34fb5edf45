#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsflow/errors.hpp"
#include "hsflow/model.hpp"
#include "hsflow/quadrature.hpp"

namespace hsflow::solver {

enum class TimeIntegrator { euler, heun };

inline std::string to_string(TimeIntegrator t) { return t == TimeIntegrator::euler ? "euler" : "heun"; }

struct SolverConfig {
  std::size_t n1 = 128;  ///< intervals in y_1
  std::size_t n2 = 32;   ///< intervals in eta
  double dt_safety = 0.5;
  double linear_tolerance = 1e-10;
  TimeIntegrator time_integrator = TimeIntegrator::heun;
  /// Reuse the previous LU factor as a preconditioner for iterative
  /// refinement; refactor when the contraction stalls.
  bool reuse_factorization = true;

  void validate() const {
    if (n1 < 16 || n2 < 16) throw InvalidParameter("SolverConfig: n1, n2 must be >= 16");
    if (!(dt_safety > 0.0 && dt_safety <= 1.0)) {
      throw InvalidParameter("SolverConfig: dt_safety must be in (0, 1]");
    }
    if (!(linear_tolerance > 0.0)) throw InvalidParameter("SolverConfig: linear_tolerance must be positive");
  }
};

/// Laplacian pushed forward to (y_1, eta), eta = y_2 / H, H = eps S:
/// grad_y p = B (p_1, p_eta) with B = [[1, -eta H'/H], [0, 1/H]], metric
/// G = B^T B, Jacobian J = H, divergence-form matrix A = J G.
struct TransformCoefficients {
  double g11 = 1.0, g12 = 0.0, g22 = 1.0;
  double jacobian = 1.0;

  double a11() const { return jacobian * g11; }
  double a12() const { return jacobian * g12; }
  double a22() const { return jacobian * g22; }
};

inline TransformCoefficients transform_coefficients(double S, double S_y1, double eps, double eta) {
  if (!(S > 0.0)) throw GeometryCollapseError("transform_coefficients: S <= 0");
  const double H = eps * S, Hp = eps * S_y1;
  TransformCoefficients c;
  c.g11 = 1.0;
  c.g12 = -eta * Hp / H;
  c.g22 = (1.0 + eta * eta * Hp * Hp) / (H * H);
  c.jacobian = H;
  return c;
}

inline TransformCoefficients transform_coefficients(const FreeBoundaryState& s, double eps,
                                                    std::size_t node, double eta) {
  if (node >= s.size()) throw InvalidParameter("transform_coefficients: node out of range");
  return transform_coefficients(s.S_values[node], s.slope()[node], eps, eta);
}

/// Pressure on the (n1+1) x (n2+1) mapped grid, row-major in y_1: index i (n2+1) + j.
struct MappedPressureGrid {
  double eps = 0.0;
  double t = 0.0;
  std::size_t n1 = 0, n2 = 0;
  double l = 1.0;
  std::vector<double> p_values;
  FreeBoundaryState S_snapshot;
  double linear_residual = 0.0;

  double h1() const { return l / static_cast<double>(n1); }
  double h2() const { return 1.0 / static_cast<double>(n2); }
  double eta(std::size_t j) const { return static_cast<double>(j) * h2(); }
  double y1(std::size_t i) const { return static_cast<double>(i) * h1(); }
  double at(std::size_t i, std::size_t j) const { return p_values[i * (n2 + 1) + j]; }
  /// Physical y_2 of node (i, j).
  double y2(std::size_t i, std::size_t j) const { return eta(j) * eps * S_snapshot.S_values[i]; }

  /// Mapped derivatives (p_1, p_eta) at a node: central inside, second-order one-sided on edges.
  std::pair<double, double> mapped_gradient(std::size_t i, std::size_t j) const {
    // f(k) samples along one axis at offset k from the node
    auto d = [](auto f, std::size_t k, std::size_t n, double h) {
      if (k == 0) return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
      if (k == n) return (3.0 * f(0) - 4.0 * f(-1) + f(-2)) / (2.0 * h);
      return (f(1) - f(-1)) / (2.0 * h);
    };
    auto along1 = [&](int k) { return at(static_cast<std::size_t>(static_cast<long>(i) + k), j); };
    auto along2 = [&](int k) { return at(i, static_cast<std::size_t>(static_cast<long>(j) + k)); };
    return {d(along1, i, n1, h1()), d(along2, j, n2, h2())};
  }

  /// Physical gradient (p_y1, p_y2) at a node by the chain rule with the solve's geometry.
  std::pair<double, double> physical_gradient(std::size_t i, std::size_t j,
                                              const std::vector<double>& S_slope) const {
    const auto [p1, pe] = mapped_gradient(i, j);
    const double H = eps * S_snapshot.S_values[i], Hp = eps * S_slope[i];
    return {p1 - eta(j) * Hp / H * pe, pe / H};
  }
};

/// Assembles and solves the vertex-centred finite-volume system on the mapped
/// rectangle. The sparsity pattern depends only on (n1, n2), so the symbolic
/// LU analysis is reused across time steps.
class LaplaceSolver {
 public:
  LaplaceSolver(const BoundaryFluxData& flux, double eps, SolverConfig cfg)
      : flux_(flux), eps_(eps), cfg_(cfg) {
    flux_.validate();
    cfg_.validate();
    if (!(eps > 0.0)) throw InvalidParameter("LaplaceSolver: eps must be positive");
  }

  const SolverConfig& config() const { return cfg_; }
  double eps() const { return eps_; }
  const BoundaryFluxData& flux() const { return flux_; }
  std::size_t factorizations() const { return factorizations_; }

  MappedPressureGrid solve(const FreeBoundaryState& state, double t) {
    const std::size_t n1 = cfg_.n1, n2 = cfg_.n2;
    if (state.size() != n1 + 1) throw InvalidParameter("LaplaceSolver: state grid does not match n1");
    for (double s : state.S_values) {
      if (!(s > 0.0)) throw GeometryCollapseError("LaplaceSolver: S <= 0");
    }
    const double l = flux_.l;
    const double h1 = l / static_cast<double>(n1), h2 = 1.0 / static_cast<double>(n2);
    const auto Sy = state.slope();
    std::vector<double> H(n1 + 1), Hp(n1 + 1);
    for (std::size_t i = 0; i <= n1; ++i) {
      H[i] = eps_ * state.S_values[i];
      Hp[i] = eps_ * Sy[i];
    }
    const std::size_t N = (n1 + 1) * n2;
    auto idx = [n2](std::size_t i, std::size_t j) { return i * n2 + j; };

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(N * 13);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));

    // Stencil coefficient for unknown (i, j); the Dirichlet row j = n2 drops out.
    auto add = [&](std::size_t row, std::size_t i, std::size_t j, double c) {
      if (j >= n2) return;
      trip.emplace_back(static_cast<int>(row), static_cast<int>(idx(i, j)), c);
    };
    // d/deta at node (i, j) as (node, weight) pairs
    auto d_eta = [&](std::size_t row, std::size_t i, std::size_t j, double w) {
      if (j == 0) {
        add(row, i, 0, -3.0 * w / (2 * h2));
        add(row, i, 1, 4.0 * w / (2 * h2));
        add(row, i, 2, -1.0 * w / (2 * h2));
      } else {
        add(row, i, j + 1, w / (2 * h2));
        add(row, i, j - 1, -w / (2 * h2));
      }
    };
    auto d_y1 = [&](std::size_t row, std::size_t i, std::size_t j, double w) {
      if (j >= n2) return;  // p = 0 along the top row
      if (i == 0) {
        add(row, 0, j, -3.0 * w / (2 * h1));
        add(row, 1, j, 4.0 * w / (2 * h1));
        add(row, 2, j, -1.0 * w / (2 * h1));
      } else if (i == n1) {
        add(row, n1, j, 3.0 * w / (2 * h1));
        add(row, n1 - 1, j, -4.0 * w / (2 * h1));
        add(row, n1 - 2, j, 1.0 * w / (2 * h1));
      } else {
        add(row, i + 1, j, w / (2 * h1));
        add(row, i - 1, j, -w / (2 * h1));
      }
    };

    for (std::size_t i = 0; i <= n1; ++i) {
      const double y_lo = std::max(0.0, (static_cast<double>(i) - 0.5) * h1);
      const double y_hi = std::min(l, (static_cast<double>(i) + 0.5) * h1);
      for (std::size_t j = 0; j < n2; ++j) {
        const std::size_t row = idx(i, j);
        const double e_lo = std::max(0.0, (static_cast<double>(j) - 0.5) * h2);
        const double e_hi = (static_cast<double>(j) + 0.5) * h2;
        const double e_mid = 0.5 * (e_lo + e_hi);
        const double len_e = e_hi - e_lo, len_y = y_hi - y_lo;
        // Each face contributes -(outward flux of A grad p); rows read
        // sum_faces -(A grad p . n) = boundary influx.
        for (int side : {-1, 1}) {
          // east/west face at y_{i +- 1/2}
          if ((side < 0 && i == 0) || (side > 0 && i == n1)) continue;
          const std::size_t k = side > 0 ? i + 1 : i - 1;
          const double Hm = 0.5 * (H[i] + H[k]);
          const double Hpm = (H[std::max(i, k)] - H[std::min(i, k)]) / h1;
          const double a11 = Hm, a12 = -e_mid * Hpm;
          const double w = -side * len_e;
          add(row, k, j, w * a11 * side / h1);
          add(row, i, j, -w * a11 * side / h1);
          d_eta(row, i, j, w * a12 * 0.5);
          d_eta(row, k, j, w * a12 * 0.5);
        }
        for (int side : {-1, 1}) {
          // north/south face at eta_{j +- 1/2}; the south face of j = 0 is the bottom wall
          if (side < 0 && j == 0) continue;
          const std::size_t k = side > 0 ? j + 1 : j - 1;
          const double ef = (static_cast<double>(j) + 0.5 * side) * h2;
          const double a21 = -ef * Hp[i];
          const double a22 = (1.0 + ef * ef * Hp[i] * Hp[i]) / H[i];
          const double w = -side * len_y;
          add(row, i, k, w * a22 * side / h2);
          add(row, i, j, -w * a22 * side / h2);
          d_y1(row, i, j, w * a21 * 0.5);
          d_y1(row, i, k, w * a21 * 0.5);
        }
        double influx = 0.0;
        if (j == 0) {
          influx += quad::gauss_legendre(
              [&](double y) { return eval_phi_eps(flux_, eps_, Side::bottom, y, t); }, y_lo, y_hi, 2);
        }
        if (i == 0 || i == n1) {
          const Side s = i == 0 ? Side::left : Side::right;
          const double Hw = H[i];
          influx += Hw * quad::gauss_legendre(
                             [&](double e) {
                               return eval_phi_eps(flux_, eps_, s, std::min(e * Hw, 1.2 * eps_), t);
                             },
                             e_lo, e_hi, 2);
        }
        rhs[static_cast<Eigen::Index>(row)] = influx;
      }
    }

    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    const double bn = rhs.norm();
    const double scale = bn > 0.0 ? bn : 1.0;
    Eigen::VectorXd x;
    double res = 0.0;
    bool done = false;
    const bool same_shape = analyzed_ && analyzed_n1_ == n1 && analyzed_n2_ == n2;
    if (same_shape && cfg_.reuse_factorization) {
      // iterative refinement preconditioned by the last factorization
      x = warm_.size() == rhs.size() ? warm_ : Eigen::VectorXd(lu_->solve(rhs));
      double prev = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 12; ++k) {
        const Eigen::VectorXd r = rhs - A * x;
        res = r.norm() / scale;
        if (res <= cfg_.linear_tolerance) {
          done = true;
          break;
        }
        if (res > 0.5 * prev) break;
        prev = res;
        x += lu_->solve(r);
      }
    }
    if (!done) {
      if (!same_shape) {
        lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        lu_->analyzePattern(A);
        analyzed_ = true;
        analyzed_n1_ = n1;
        analyzed_n2_ = n2;
      }
      lu_->factorize(A);
      ++factorizations_;
      if (lu_->info() != Eigen::Success) {
        throw SolverConvergenceError("LaplaceSolver: factorization failed");
      }
      x = lu_->solve(rhs);
      for (int k = 0; k < 3; ++k) {
        const Eigen::VectorXd r = rhs - A * x;
        res = r.norm() / scale;
        if (res <= cfg_.linear_tolerance) break;
        x += lu_->solve(r);
      }
    }
    if (!(res <= cfg_.linear_tolerance)) {
      throw SolverConvergenceError("LaplaceSolver: residual above linear_tolerance");
    }
    warm_ = x;

    MappedPressureGrid g;
    g.eps = eps_;
    g.t = t;
    g.n1 = n1;
    g.n2 = n2;
    g.l = l;
    g.S_snapshot = state;
    g.S_snapshot.t = t;
    g.linear_residual = res;
    g.p_values.assign((n1 + 1) * (n2 + 1), 0.0);
    for (std::size_t i = 0; i <= n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        g.p_values[i * (n2 + 1) + j] = x[static_cast<Eigen::Index>(idx(i, j))];
      }
    }
    return g;
  }

 private:
  BoundaryFluxData flux_;
  double eps_;
  SolverConfig cfg_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
  Eigen::VectorXd warm_;
  std::size_t factorizations_ = 0;
  bool analyzed_ = false;
  std::size_t analyzed_n1_ = 0, analyzed_n2_ = 0;
};

inline MappedPressureGrid solve_laplace_step(const FreeBoundaryState& state,
                                             const BoundaryFluxData& flux, double eps,
                                             const SolverConfig& config) {
  LaplaceSolver s(flux, eps, config);
  return s.solve(state, state.t);
}

/// dS/dt on the free boundary: S_t = (eps S_y1 p_y1 - p_y2) / (eps gamma).
/// With p = 0 along eta = 1 this is -p_eta (1 + eps^2 S_y1^2) / (eps^2 S gamma).
inline std::vector<double> stefan_velocity(const MappedPressureGrid& g, double gamma) {
  const std::size_t n1 = g.n1, n2 = g.n2;
  const auto Sy = g.S_snapshot.slope();
  const double h2 = g.h2();
  std::vector<double> v(n1 + 1);
  for (std::size_t i = 0; i <= n1; ++i) {
    const double pe = (3.0 * g.at(i, n2) - 4.0 * g.at(i, n2 - 1) + g.at(i, n2 - 2)) / (2.0 * h2);
    const double S = g.S_snapshot.S_values[i];
    v[i] = -pe * (1.0 + g.eps * g.eps * Sy[i] * Sy[i]) / (g.eps * g.eps * S * gamma);
  }
  return v;
}

/// Total inflow through the fixed walls: int over the bottom and both sides of Phi^eps.
inline double total_influx(const BoundaryFluxData& flux, double eps, double S_left, double S_right,
                           double t) {
  const double bottom = eps * flux.bottom_integral(t);
  const double left = eps * flux.lateral_integral_left(t, std::min(S_left, 1.0));
  const double right = eps * flux.lateral_integral_right(t, std::min(S_right, 1.0));
  return bottom + left + right;
}

struct Snapshot {
  double t = 0.0;
  FreeBoundaryState state;
  MappedPressureGrid grid;
  std::vector<double> velocity;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::size_t steps = 0;
  std::size_t solves = 0;

  bool empty() const { return snapshots.empty(); }
  const Snapshot& back() const { return snapshots.back(); }
};

/// Controlled stop when |S - 1| reaches 1/5; carries everything computed so far.
struct RunAborted : std::runtime_error {
  Trajectory partial;
  double t_abort;
  RunAborted(Trajectory p, double t)
      : std::runtime_error("run aborted: |S - 1| reached 1/5"), partial(std::move(p)), t_abort(t) {}
};

namespace detail {

inline double step_limit(const std::vector<double>& v, double h1) {
  double g = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) g = std::max(g, std::abs(v[i] - v[i - 1]) / h1);
  return g > 0.0 ? h1 / g : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Marches S from the last snapshot through `output_times` (strictly
/// increasing, all later than the last snapshot), storing one snapshot per
/// output time. Step size: dt_safety * min(dy_1 / max |dV/dy_1|, output spacing).
inline void advance(Trajectory& traj, LaplaceSolver& solver, const std::vector<double>& output_times) {
  if (traj.empty()) throw InvalidParameter("advance: trajectory must hold an initial snapshot");
  const auto& cfg = solver.config();
  const double gamma = solver.flux().gamma;
  FreeBoundaryState state = traj.back().state;
  std::vector<double> v = traj.back().velocity;
  double t = traj.back().t;
  const double h1 = state.spacing();

  auto check = [&](const FreeBoundaryState& s, double at) {
    if (!s.within_bounds()) throw RunAborted(traj, at);
  };
  for (double t_out : output_times) {
    if (!(t_out > t)) throw InvalidParameter("advance: output times must increase");
    const double out_gap = t_out - t;
    while (t < t_out) {
      double dt = cfg.dt_safety * std::min(detail::step_limit(v, h1), out_gap);
      if (t + dt > t_out - 1e-12 * t_out) dt = t_out - t;
      FreeBoundaryState next = state;
      if (cfg.time_integrator == TimeIntegrator::euler) {
        for (std::size_t i = 0; i < next.size(); ++i) next.S_values[i] += dt * v[i];
      } else {
        FreeBoundaryState pred = state;
        for (std::size_t i = 0; i < pred.size(); ++i) pred.S_values[i] += dt * v[i];
        check(pred, t + dt);
        const auto gp = solver.solve(pred, t + dt);
        ++traj.solves;
        const auto vp = stefan_velocity(gp, gamma);
        for (std::size_t i = 0; i < next.size(); ++i) next.S_values[i] += 0.5 * dt * (v[i] + vp[i]);
      }
      t = (dt == t_out - t) ? t_out : t + dt;
      next.t = t;
      check(next, t);
      state = std::move(next);
      ++traj.steps;
      auto g = solver.solve(state, t);
      ++traj.solves;
      v = stefan_velocity(g, gamma);
      if (t == t_out) traj.snapshots.push_back({t, state, std::move(g), v});
    }
  }
}

/// Full run from the flat initial state, with snapshots at `output_times` (t = 0 included).
inline Trajectory run_reference(const BoundaryFluxData& flux, double eps, const SolverConfig& cfg,
                                const std::vector<double>& output_times) {
  LaplaceSolver solver(flux, eps, cfg);
  Trajectory traj;
  auto s0 = FreeBoundaryState::flat(flux.l, cfg.n1, eps);
  auto g0 = solver.solve(s0, 0.0);
  ++traj.solves;
  auto v0 = stefan_velocity(g0, flux.gamma);
  traj.snapshots.push_back({0.0, s0, std::move(g0), std::move(v0)});
  std::vector<double> rest;
  for (double t : output_times) {
    if (t > 0.0) rest.push_back(t);
  }
  advance(traj, solver, rest);
  return traj;
}

struct AngleReport {
  double delta = 0.0;
  double max_slope = 0.0;
  double t_at_max = 0.0;
};

/// max over snapshots of max |dS/dy_1| on [0, delta] U [l - delta, l].
inline AngleReport angle_preservation_check(const Trajectory& traj, double delta) {
  if (traj.empty()) throw InvalidParameter("angle_preservation_check: empty trajectory");
  AngleReport r;
  r.delta = delta;
  for (const auto& snap : traj.snapshots) {
    const auto d = snap.state.slope();
    const double l = snap.state.y1_grid.back();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double y = snap.state.y1_grid[i];
      if (y <= delta * (1 + 1e-12) || y >= l - delta * (1 + 1e-12)) {
        if (std::abs(d[i]) > r.max_slope) {
          r.max_slope = std::abs(d[i]);
          r.t_at_max = snap.t;
        }
      }
    }
  }
  return r;
}

}  // namespace hsflow::solver
