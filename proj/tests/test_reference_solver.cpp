#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace hsflow;
using namespace hsflow::solver;
using testing_support::constant_flux;

namespace {

constexpr double pi = std::numbers::pi;

SolverConfig grid(std::size_t n1, std::size_t n2) {
  SolverConfig c;
  c.n1 = n1;
  c.n2 = n2;
  return c;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Flux with bottom datum g(y_1) = eps chi_1 phi_2 imposed over the whole bottom.
BoundaryFluxData bottom_only(double eps, std::function<double(double)> g, double gamma = 1.0) {
  auto f = constant_flux(0, 0, 0, 1.0, gamma);
  f.chi1 = CutoffFunction(-1.0, -0.5, 1.5, 2.0);
  f.phi2 = [g, eps](double y, double) { return g(y) / eps; };
  f.phi2_dy1 = {};
  return f;
}

}  // namespace

TEST(Transform, FlatBoundaryIsDiagonal) {
  const auto c = transform_coefficients(1.0, 0.0, 0.1, 0.4);
  EXPECT_DOUBLE_EQ(c.g11, 1.0);
  EXPECT_DOUBLE_EQ(c.g12, 0.0);
  EXPECT_DOUBLE_EQ(c.g22, 100.0);
  const auto u = transform_coefficients(1.0, 0.0, 1.0, 0.7);
  EXPECT_DOUBLE_EQ(u.g11, 1.0);
  EXPECT_DOUBLE_EQ(u.g12, 0.0);
  EXPECT_DOUBLE_EQ(u.g22, 1.0);
  EXPECT_DOUBLE_EQ(u.jacobian, 1.0);
  EXPECT_THROW(transform_coefficients(0.0, 0.0, 0.1, 0.5), GeometryCollapseError);
}

// Flux-form divergence of the mapped operator applied to the pull-back of a
// harmonic function; exact derivatives at half points, so only the outer
// difference contributes error.
TEST(Transform, ManufacturedHarmonicResidualIsSecondOrder) {
  const double eps = 0.5;
  auto S = [](double x) { return 1.0 + 0.15 * std::sin(pi * x); };
  auto Sy = [](double x) { return 0.15 * pi * std::cos(pi * x); };
  // u = exp(y_1) cos(y_2) is harmonic; P(x, eta) = u(x, eta eps S(x))
  auto flux = [&](double x, double eta) {
    const double y2 = eta * eps * S(x);
    const double u1 = std::exp(x) * std::cos(y2), u2 = -std::exp(x) * std::sin(y2);
    const double Px = u1 + u2 * eta * eps * Sy(x), Pe = u2 * eps * S(x);
    const auto c = transform_coefficients(S(x), Sy(x), eps, eta);
    return std::pair{c.a11() * Px + c.a12() * Pe, c.a12() * Px + c.a22() * Pe};
  };
  auto residual = [&](double h) {
    const double x = 0.37, eta = 0.42;
    return std::abs((flux(x + h / 2, eta).first - flux(x - h / 2, eta).first) / h +
                    (flux(x, eta + h / 2).second - flux(x, eta - h / 2).second) / h);
  };
  const double r1 = residual(0.04), r2 = residual(0.02), r3 = residual(0.01);
  EXPECT_GE(testing_support::observed_order(r1, r2), 1.9);
  EXPECT_GE(testing_support::observed_order(r2, r3), 1.9);
}

TEST(Laplace, ZeroFluxGivesZeroPressure) {
  const auto flux = constant_flux(0, 0, 0);
  const auto g = solve_laplace_step(FreeBoundaryState::flat(1.0, 16, 0.1), flux, 0.1, grid(16, 16));
  EXPECT_EQ(max_abs(g.p_values), 0.0);
  for (double v : stefan_velocity(g, 1.0)) EXPECT_EQ(v, 0.0);
}

TEST(Laplace, ManufacturedSolutionSecondOrder) {
  // p = cos(pi y_1) sinh(pi (eps - y_2)): harmonic, zero on top, no lateral flux
  const double eps = 0.2;
  auto exact = [&](double y1, double y2) { return std::cos(pi * y1) * std::sinh(pi * (eps - y2)); };
  const auto flux = bottom_only(eps, [&](double y) { return pi * std::cos(pi * y) * std::cosh(pi * eps); });
  std::vector<double> err;
  for (std::size_t n : {16, 32, 64}) {
    const auto g = solve_laplace_step(FreeBoundaryState::flat(1.0, n, eps), flux, eps, grid(n, n));
    double e = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j <= n; ++j) e = std::max(e, std::abs(g.at(i, j) - exact(g.y1(i), g.y2(i, j))));
    }
    err.push_back(e);
  }
  EXPECT_GE(testing_support::observed_order(err[0], err[1]), 1.9);
  EXPECT_GE(testing_support::observed_order(err[1], err[2]), 1.9);
}

TEST(Laplace, LinearPressureGivesPrescribedSpeed) {
  // p = eps gamma v (eps S0 - y_2) on a flat raised boundary: S_t = v
  const double eps = 0.1, gamma = 1.7, v = 0.3, S0 = 1.05;
  const auto flux = bottom_only(eps, [&](double) { return eps * gamma * v; }, gamma);
  auto state = FreeBoundaryState::flat(1.0, 32, eps);
  for (double& s : state.S_values) s = S0;
  const auto g = solve_laplace_step(state, flux, eps, grid(32, 16));
  for (std::size_t i = 0; i <= 32; ++i) {
    for (std::size_t j = 0; j <= 16; ++j) ASSERT_NEAR(g.at(i, j), eps * gamma * v * (eps * S0 - g.y2(i, j)), 1e-12);
  }
  for (double s : stefan_velocity(g, gamma)) EXPECT_NEAR(s, v, 1e-9);
}

TEST(Laplace, MaximumAwayFromDirichletRow) {
  const double eps = 0.1;
  const auto g = solve_laplace_step(FreeBoundaryState::flat(1.0, 64, eps), testing_support::default_flux(), eps,
                                    grid(64, 16));
  double top = -1e300, below = -1e300;
  for (std::size_t i = 0; i <= 64; ++i) {
    top = std::max(top, g.at(i, 16));
    for (std::size_t j = 0; j < 16; ++j) below = std::max(below, g.at(i, j));
  }
  EXPECT_EQ(top, 0.0);
  EXPECT_GT(below, 0.0);
}

TEST(Laplace, InitialSpeedPositiveForDefaultPreset) {
  const double eps = 0.1;
  const auto g = solve_laplace_step(FreeBoundaryState::flat(1.0, 128, eps), testing_support::default_flux(), eps,
                                    grid(128, 32));
  for (double v : stefan_velocity(g, 1.0)) EXPECT_GT(v, 0.0);
}

TEST(Laplace, AgreesWithSpectralInitialPressure) {
  const double eps = 0.1;
  const auto flux = testing_support::default_flux();
  const auto series = spectral::build_initial_pressure(flux, eps, 64);
  // cells square in physical units: n1 = n2 / eps
  std::vector<double> err;
  for (std::size_t n : {16, 32, 64}) {
    const std::size_t n1 = 10 * n;
    const auto g = solve_laplace_step(FreeBoundaryState::flat(1.0, n1, eps), flux, eps, grid(n1, n));
    double e = 0.0;
    for (std::size_t i = 0; i <= n1; ++i) {
      for (std::size_t j = 0; j <= n; ++j) e = std::max(e, std::abs(g.at(i, j) - spectral::eval_p0(series, g.y1(i), g.y2(i, j))));
    }
    err.push_back(e);
  }
  EXPECT_GE(testing_support::observed_order(err[0], err[1]), 1.5);
  EXPECT_GE(testing_support::observed_order(err[1], err[2]), 1.5);
}

TEST(Laplace, MismatchedStateIsRejected) {
  LaplaceSolver s(testing_support::default_flux(), 0.1, grid(32, 16));
  EXPECT_THROW(s.solve(FreeBoundaryState::flat(1.0, 16, 0.1), 0.0), InvalidParameter);
  SolverConfig bad = grid(8, 16);
  EXPECT_THROW(bad.validate(), InvalidParameter);
}

TEST(Trajectory, ZeroFluxStaysFlat) {
  const auto traj = run_reference(constant_flux(0, 0, 0), 0.1, grid(16, 16), {0.0, 0.1, 0.2});
  ASSERT_EQ(traj.snapshots.size(), 3u);
  for (const auto& s : traj.snapshots) {
    for (double v : s.state.S_values) EXPECT_EQ(v, 1.0);
  }
  EXPECT_EQ(angle_preservation_check(traj, 0.1).max_slope, 0.0);
}

TEST(Trajectory, SnapshotsLandOnOutputTimes) {
  const std::vector<double> ts = {0.0, 0.01, 0.035, 0.05};
  const auto traj = run_reference(testing_support::default_flux(), 0.2, grid(16, 16), ts);
  ASSERT_EQ(traj.snapshots.size(), ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) EXPECT_EQ(traj.snapshots[k].t, ts[k]);
}

TEST(Trajectory, MonotoneExpansionAndMassBalance) {
  const double eps = 0.1;
  const auto flux = testing_support::default_flux();
  const auto ts = quad::uniform_grid(0.0, 0.25, 16);
  const auto traj = run_reference(flux, eps, grid(128, 32), ts);
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const auto& a = traj.snapshots[k - 1].state.S_values;
    const auto& b = traj.snapshots[k].state.S_values;
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_GE(b[i], a[i]);
  }
  for (const auto& s : traj.snapshots) {
    const auto w = quad::simpson_weights(s.state.size(), s.state.spacing());
    double iv = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) iv += w[i] * s.velocity[i];
    const double influx = total_influx(flux, eps, s.state.S_values.front(), s.state.S_values.back(), s.t);
    EXPECT_LT(std::abs(eps * flux.gamma * iv - influx) / influx, 0.01) << "t=" << s.t;
  }
}

TEST(Trajectory, PlateauApproachesAsymptoticLaw) {
  const double c = 0.4, T = 0.25;
  const auto flux = constant_flux(0, c, 0, T);
  std::vector<double> gap;
  for (double eps : {0.2, 0.1}) {
    const auto traj = run_reference(flux, eps, grid(static_cast<std::size_t>(12.8 / eps), 32), {0.0, T});
    const auto& st = traj.back().state;
    gap.push_back(std::abs(st.S_values[st.size() / 2] - (1.0 + c * T)));
  }
  EXPECT_LT(gap[1], gap[0]);
}

TEST(Trajectory, IntegratorOrders) {
  const double eps = 0.2, T = 0.05;
  const auto flux = testing_support::default_flux();
  const auto ts = quad::uniform_grid(0.0, T, 8);
  auto final_S = [&](TimeIntegrator ti, double safety) {
    auto c = grid(16, 16);
    c.time_integrator = ti;
    c.dt_safety = safety;
    const auto traj = run_reference(flux, eps, c, ts);
    return traj.back().state.S_values;
  };
  for (auto [ti, expected] : {std::pair{TimeIntegrator::euler, 1.0}, std::pair{TimeIntegrator::heun, 2.0}}) {
    const auto a = final_S(ti, 0.5), b = final_S(ti, 0.25), c = final_S(ti, 0.125);
    double dab = 0.0, dbc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      dab = std::max(dab, std::abs(a[i] - b[i]));
      dbc = std::max(dbc, std::abs(b[i] - c[i]));
    }
    EXPECT_NEAR(testing_support::observed_order(dab, dbc), expected, 0.2) << to_string(ti);
  }
}

TEST(Trajectory, AbortsOnGeometryBound) {
  const auto flux = constant_flux(0, 5.0, 0, 1.0);
  try {
    run_reference(flux, 0.2, grid(16, 16), {0.0, 0.5, 1.0});
    FAIL() << "expected an abort";
  } catch (const RunAborted& a) {
    EXPECT_FALSE(a.partial.empty());
    EXPECT_LT(a.partial.back().t, 1.0);
    EXPECT_GT(a.t_abort, 0.0);
  }
}
