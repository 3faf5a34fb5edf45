#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "hsflow/errors.hpp"
#include "hsflow/model.hpp"
#include "hsflow/quadrature.hpp"

namespace hsflow::asymptotics {

/// h_0(t) = (1/l) (int_0^1 chi_2 phi_1 + int_0^1 chi_2 phi_3): the lateral
/// inflow spread uniformly over the strip length.
inline double compute_h0(const BoundaryFluxData& flux, double t) {
  return (flux.lateral_integral_left(t) + flux.lateral_integral_right(t)) / flux.l;
}

/// Middle value (1/f) int_0^f v.
template <class V>
double middle_value(V&& v, double f, int panels = 32) {
  if (!(f > 0.0)) throw InvalidParameter("middle_value: height must be positive");
  return quad::gauss_legendre(v, 0.0, f, panels) / f;
}

/// The leading-order free-boundary law
///   S = 1 + (1/gamma) int_0^t chi_1 phi_2 dtau + (1/gamma) int_0^t h_0 dtau.
class FreeBoundaryEvolution {
 public:
  explicit FreeBoundaryEvolution(BoundaryFluxData flux, std::size_t time_intervals = 512)
      : flux_(std::move(flux)) {
    flux_.validate();
    if (time_intervals < 1) throw InvalidParameter("FreeBoundaryEvolution: need time intervals");
    dt_ = flux_.T / static_cast<double>(time_intervals);
    H_.assign(time_intervals + 1, 0.0);
    D_.assign(time_intervals + 1, h0(0.0));
    for (std::size_t k = 1; k <= time_intervals; ++k) {
      const double a = dt_ * static_cast<double>(k - 1);
      H_[k] = H_[k - 1] + quad::gauss_legendre([&](double s) { return h0(s); }, a, a + dt_, 2);
      D_[k] = h0(a + dt_);
    }
  }

  const BoundaryFluxData& flux() const { return flux_; }
  double T() const { return flux_.T; }
  double l() const { return flux_.l; }
  double gamma() const { return flux_.gamma; }

  double h0(double t) const { return compute_h0(flux_, t); }

  /// int_0^t h_0: cumulative quadrature at the cache nodes, cubic Hermite
  /// (slopes h_0) in between.
  double lateral_cumulative(double t) const {
    check_time(t);
    t = std::clamp(t, 0.0, flux_.T);
    const auto k = std::min(static_cast<std::size_t>(t / dt_), H_.size() - 1);
    const double a = dt_ * static_cast<double>(k);
    if (t <= a) return H_[k];
    const double s = (t - a) / dt_;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * H_[k] + h10 * dt_ * D_[k] + h01 * H_[k + 1] + h11 * dt_ * D_[k + 1];
  }

  /// int_0^t chi_1 phi_2 (y1, tau) dtau
  double bottom_cumulative(double y1, double t) const {
    check_point(y1, t);
    if (flux_.chi1(y1) == 0.0 || t <= 0.0) return 0.0;
    return quad::gauss_legendre([&](double s) { return flux_.chi1_phi2(y1, s); }, 0.0, t,
                                time_panels(t));
  }

  double S(double y1, double t) const {
    check_point(y1, t);
    return 1.0 + (bottom_cumulative(y1, t) + lateral_cumulative(t)) / flux_.gamma;
  }

  /// Right side of the Cauchy problem, not a difference quotient.
  double S_t(double y1, double t) const {
    check_point(y1, t);
    return (flux_.chi1_phi2(y1, t) + h0(t)) / flux_.gamma;
  }

  double S_y1(double y1, double t) const {
    check_point(y1, t);
    if (t <= 0.0) return 0.0;
    const auto& c = flux_.chi1;
    if (y1 <= c.support_lo() || y1 >= c.support_hi()) return 0.0;
    return quad::gauss_legendre([&](double s) { return flux_.d_chi1_phi2(y1, s); }, 0.0, t,
                                time_panels(t)) /
           flux_.gamma;
  }

  /// (S_0(t), S_l(t)): the heights on the flat corner neighbourhoods.
  std::pair<double, double> corner_heights(double t) const {
    const double s = 1.0 + lateral_cumulative(t) / flux_.gamma;
    return {s, s};
  }

 private:
  void check_time(double t) const {
    if (t < -1e-12 * flux_.T || t > flux_.T * (1.0 + 1e-12)) {
      throw DomainError("asymptotics: t outside [0, T]");
    }
  }
  void check_point(double y1, double t) const {
    check_time(t);
    if (y1 < -1e-12 * flux_.l || y1 > flux_.l * (1.0 + 1e-12)) {
      throw DomainError("asymptotics: y1 outside [0, l]");
    }
  }
  int time_panels(double t) const {
    return std::max(2, static_cast<int>(std::ceil(8.0 * t / flux_.T)));
  }

  BoundaryFluxData flux_;
  double dt_ = 0.0;
  std::vector<double> H_, D_;
};

inline double evolve_S(const FreeBoundaryEvolution& e, double y1, double t) { return e.S(y1, t); }
inline std::pair<double, double> corner_heights(const FreeBoundaryEvolution& e, double t) {
  return e.corner_heights(t);
}

/// Cubic Hermite interpolation on a uniform grid; returns value and slope.
inline std::pair<double, double> hermite_eval(const std::vector<double>& x,
                                              const std::vector<double>& f,
                                              const std::vector<double>& df, double at) {
  const std::size_t n = x.size();
  const double h = x[1] - x[0];
  auto i = static_cast<std::size_t>(std::clamp((at - x[0]) / h, 0.0, static_cast<double>(n - 2)));
  i = std::min(i, n - 2);
  const double s = (at - x[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  const double v = h00 * f[i] + h10 * h * df[i] + h01 * f[i + 1] + h11 * h * df[i + 1];
  const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -d00, d11 = 3 * s * s - 2 * s;
  const double d = (d00 * f[i] + d01 * f[i + 1]) / h + d10 * df[i] + d11 * df[i + 1];
  return {v, d};
}

/// Linear interpolation on a uniform grid.
inline double linear_eval(const std::vector<double>& x, const std::vector<double>& f, double at) {
  const std::size_t n = x.size();
  const double h = x[1] - x[0];
  auto i = static_cast<std::size_t>(std::clamp((at - x[0]) / h, 0.0, static_cast<double>(n - 2)));
  i = std::min(i, n - 2);
  const double s = (at - x[i]) / h;
  return (1 - s) * f[i] + s * f[i + 1];
}

/// Leading-order pressure w_0(., t) with its Gamma-mean removed (the profile
/// called frak w_0), plus first and second derivatives on a uniform grid.
struct LimitProfile {
  double t = 0.0;
  double eps = 0.0;
  std::vector<double> y1_grid;
  std::vector<double> S_values;
  std::vector<double> S_y1_values;
  std::vector<double> w0_values;
  std::vector<double> w0_prime_values;
  std::vector<double> w0_second_values;
  double gamma_mean = 0.0;
  double h0 = 0.0;
  /// w_0'(l) from the integration minus the prescribed right boundary value.
  double right_bc_residual = 0.0;

  double value(double y1) const {
    return hermite_eval(y1_grid, w0_values, w0_prime_values, y1).first;
  }
  double slope(double y1) const {
    return hermite_eval(y1_grid, w0_prime_values, w0_second_values, y1).first;
  }
};

struct ProfileOptions {
  std::size_t intervals = 512;
  double right_bc_tolerance = 1e-8;
};

/// Integrates the first-order reduction S w_0' = S_0 w_0'(0) + y_1 h_0 with
/// w_0'(0) = -<<chi_2 phi_1>>_{S_0}, then w_0 by a Hermite-corrected
/// cumulative rule using w_0'' = (h_0 - S_y1 w_0') / S. The right boundary
/// value <<chi_2 phi_3>>_{S_l} is checked, not imposed.
inline LimitProfile solve_limit_profile(const FreeBoundaryEvolution& evo, double t, double eps,
                                        ProfileOptions opt = {}) {
  if (opt.intervals < 4) throw InvalidParameter("solve_limit_profile: need at least 4 intervals");
  if (!(eps > 0.0)) throw InvalidParameter("solve_limit_profile: eps must be positive");
  const auto& flux = evo.flux();
  LimitProfile p;
  p.t = t;
  p.eps = eps;
  p.y1_grid = quad::uniform_grid(0.0, flux.l, opt.intervals);
  const std::size_t n = p.y1_grid.size();
  const double h = p.y1_grid[1] - p.y1_grid[0];
  p.S_values.resize(n);
  p.S_y1_values.resize(n);
  const double lateral = evo.lateral_cumulative(t);
  for (std::size_t i = 0; i < n; ++i) {
    p.S_values[i] = 1.0 + (evo.bottom_cumulative(p.y1_grid[i], t) + lateral) / flux.gamma;
    p.S_y1_values[i] = evo.S_y1(p.y1_grid[i], t);
    if (!(p.S_values[i] > 0.0)) throw GeometryCollapseError("solve_limit_profile: S <= 0");
  }
  const double S0 = 1.0 + lateral / flux.gamma, Sl = S0;
  p.h0 = evo.h0(t);
  const double left_mass = flux.lateral_integral_left(t, std::min(S0, 1.0));
  const double right_mass = flux.lateral_integral_right(t, std::min(Sl, 1.0));
  const double w0p_left = -left_mass / S0;
  const double w0p_right = right_mass / Sl;

  p.w0_prime_values.resize(n);
  p.w0_second_values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double S = p.S_values[i];
    p.w0_prime_values[i] = (S0 * w0p_left + p.y1_grid[i] * p.h0) / S;
    p.w0_second_values[i] = (p.h0 - p.S_y1_values[i] * p.w0_prime_values[i]) / S;
  }
  p.right_bc_residual = p.w0_prime_values.back() - w0p_right;
  const double scale = std::max({1.0, std::abs(w0p_left), std::abs(w0p_right)});
  if (std::abs(p.right_bc_residual) > opt.right_bc_tolerance * scale) {
    throw SolvabilityError("solve_limit_profile: right boundary condition not reproduced");
  }

  auto w0 = quad::cumulative_hermite(p.w0_prime_values, p.w0_second_values, h);
  const auto wq = quad::simpson_weights(n, h);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ds = std::sqrt(1.0 + eps * eps * p.S_y1_values[i] * p.S_y1_values[i]);
    num += wq[i] * ds * w0[i];
    den += wq[i] * ds;
  }
  p.gamma_mean = num / den;
  for (double& v : w0) v -= p.gamma_mean;
  p.w0_values = std::move(w0);
  return p;
}

/// u_2(y_1, xi, t) = A xi^2 + B xi + C, with A = -w_0''/2, B = -chi_1 phi_2 and
/// C chosen so that u_2 vanishes at xi = S.
struct CorrectorField {
  double t = 0.0;
  std::vector<double> y1_grid;
  std::vector<double> S_values;
  std::vector<double> A, B, C;
  /// dA/dy_1 (second-order differences) and dB/dy_1 (exact), per node
  std::vector<double> dA, dB;
  /// |du_2/dxi(S) - (S_y1 w_0' - gamma S_t)| at every node
  std::vector<double> top_slope_residual;
  /// u_2 sampled on xi_j = j S / (n_xi - 1) per y_1 node, row-major in y_1.
  std::vector<double> u2_values;
  std::size_t n_xi = 0;

  double value(double y1, double xi) const { return value_at_height(y1, xi, linear_eval(y1_grid, S_values, y1)); }
  double d_xi(double y1, double xi) const { return 2.0 * a(y1) * xi + b(y1); }
  /// u_2 with the top condition imposed at height S, so it vanishes exactly at xi = S.
  double value_at_height(double y1, double xi, double S) const {
    return (xi - S) * (a(y1) * (xi + S) + b(y1));
  }
  /// d/dy_1 of value_at_height for a top S(y_1) with slope S_y1.
  double d_y1_at_height(double y1, double xi, double S, double S_y1) const {
    const auto [av, ad] = hermite_eval(y1_grid, A, dA, y1);
    const auto [bv, bd] = hermite_eval(y1_grid, B, dB, y1);
    return ad * (xi * xi - S * S) + bd * (xi - S) - (2.0 * av * S + bv) * S_y1;
  }
  double max_top_slope_residual() const {
    double m = 0.0;
    for (double r : top_slope_residual) m = std::max(m, r);
    return m;
  }

 private:
  double a(double y1) const { return hermite_eval(y1_grid, A, dA, y1).first; }
  double b(double y1) const { return hermite_eval(y1_grid, B, dB, y1).first; }
};

inline CorrectorField solve_corrector(const LimitProfile& profile, const FreeBoundaryEvolution& evo,
                                      double tolerance = 1e-6, std::size_t n_xi = 17) {
  const auto& flux = evo.flux();
  CorrectorField c;
  c.t = profile.t;
  c.y1_grid = profile.y1_grid;
  c.S_values = profile.S_values;
  const std::size_t n = c.y1_grid.size();
  c.A.resize(n);
  c.B.resize(n);
  c.C.resize(n);
  c.dB.resize(n);
  c.top_slope_residual.resize(n);
  c.n_xi = n_xi;
  c.u2_values.resize(n * n_xi);
  for (std::size_t i = 0; i < n; ++i) {
    const double y1 = c.y1_grid[i];
    const double S = c.S_values[i];
    const double A = -0.5 * profile.w0_second_values[i];
    const double B = -flux.chi1_phi2(y1, profile.t);
    const double C = -(A * S + B) * S;
    c.A[i] = A;
    c.B[i] = B;
    c.C[i] = C;
    c.dB[i] = -flux.d_chi1_phi2(y1, profile.t);
    const double top = 2.0 * A * S + B;
    const double target =
        profile.S_y1_values[i] * profile.w0_prime_values[i] - (flux.chi1_phi2(y1, profile.t) + profile.h0);
    c.top_slope_residual[i] = std::abs(top - target);
    for (std::size_t j = 0; j < n_xi; ++j) {
      const double xi = S * static_cast<double>(j) / static_cast<double>(n_xi - 1);
      c.u2_values[i * n_xi + j] = (A * xi + B) * xi + C;
    }
  }
  c.dA.resize(n);
  const double h = c.y1_grid[1] - c.y1_grid[0];
  for (std::size_t i = 1; i + 1 < n; ++i) c.dA[i] = (c.A[i + 1] - c.A[i - 1]) / (2 * h);
  c.dA[0] = (-3 * c.A[0] + 4 * c.A[1] - c.A[2]) / (2 * h);
  c.dA[n - 1] = (3 * c.A[n - 1] - 4 * c.A[n - 2] + c.A[n - 3]) / (2 * h);
  if (c.max_top_slope_residual() > tolerance) {
    throw SolvabilityError("solve_corrector: top-slope identity violated");
  }
  return c;
}

enum class LayerSide { left, right };

/// Corner boundary layer on the half strip (0, inf) x (0, H), with Neumann
/// datum Upsilon on xi_1 = 0 expanded as a_0 + sum a_m cos(pi m xi_2 / H).
/// Decay requires a_0 = 0; the layer itself is
///   Pi(xi_1, xi_2) = -sum_{m>=1} a_m (H / (pi m)) exp(-pi m xi_1 / H) cos(pi m xi_2 / H),
/// so that dPi/dxi_1 (0, .) reproduces Upsilon.
struct BoundaryLayerSolution {
  LayerSide side = LayerSide::left;
  double t = 0.0;
  double height = 1.0;
  std::vector<double> coefficients;

  double abs_sum() const {
    double s = 0.0;
    for (std::size_t m = 1; m < coefficients.size(); ++m) s += std::abs(coefficients[m]);
    return s;
  }
  double value(double xi1, double xi2) const {
    double v = 0.0;
    for (std::size_t m = 1; m < coefficients.size(); ++m) {
      const double k = std::numbers::pi * static_cast<double>(m) / height;
      v -= coefficients[m] / k * std::exp(-k * xi1) * std::cos(k * xi2);
    }
    return v;
  }
  /// (dPi/dxi_1, dPi/dxi_2)
  std::pair<double, double> gradient(double xi1, double xi2) const {
    double g1 = 0.0, g2 = 0.0;
    for (std::size_t m = 1; m < coefficients.size(); ++m) {
      const double k = std::numbers::pi * static_cast<double>(m) / height;
      const double e = std::exp(-k * xi1);
      g1 += coefficients[m] * e * std::cos(k * xi2);
      g2 += coefficients[m] * e * std::sin(k * xi2);
    }
    return {g1, g2};
  }
};

/// Cosine coefficients of a generic Neumann datum Upsilon(xi_2) on (0, H).
inline BoundaryLayerSolution boundary_layer(const std::function<double(double)>& upsilon,
                                            double height, LayerSide side, double t, int M,
                                            int panels = 256) {
  if (!(height > 0.0)) throw InvalidParameter("boundary_layer: height must be positive");
  if (M < 0) throw InvalidParameter("boundary_layer: negative truncation");
  BoundaryLayerSolution b;
  b.side = side;
  b.t = t;
  b.height = height;
  b.coefficients.resize(static_cast<std::size_t>(M) + 1);
  for (int m = 0; m <= M; ++m) {
    const double k = std::numbers::pi * m / height;
    const double w = (m == 0 ? 1.0 : 2.0) / height;
    b.coefficients[static_cast<std::size_t>(m)] =
        w * quad::gauss_legendre([&](double x) { return upsilon(x) * std::cos(k * x); }, 0.0,
                                 height, panels);
  }
  return b;
}

/// Layer for the flux data: Upsilon = -chi_2 phi_1 - w_0'(0) (left) or
/// chi_2 phi_3 - w_0'(l) (right). The windowed part is integrated with the
/// same rule as the middle value, the constant part in closed form, so a_0
/// cancels to rounding when the profile boundary values hold.
inline BoundaryLayerSolution boundary_layer(const FreeBoundaryEvolution& evo,
                                            const LimitProfile& profile, LayerSide side, int M,
                                            double a0_tolerance = 1e-10) {
  if (M < 0) throw InvalidParameter("boundary_layer: negative truncation");
  const auto& flux = evo.flux();
  const double t = profile.t;
  const auto [S0, Sl] = evo.corner_heights(t);
  const bool left = side == LayerSide::left;
  const double H = left ? S0 : Sl;
  const double sign = left ? -1.0 : 1.0;
  const double w0p = left ? profile.w0_prime_values.front() : profile.w0_prime_values.back();
  const SpaceTimeFn& phi = left ? flux.phi1 : flux.phi3;

  BoundaryLayerSolution b;
  b.side = side;
  b.t = t;
  b.height = H;
  b.coefficients.resize(static_cast<std::size_t>(M) + 1);
  for (int m = 0; m <= M; ++m) {
    const double k = std::numbers::pi * m / H;
    const double windowed = flux.chi2.integrate_product(
        [&](double x) { return phi(x, t) * std::cos(k * x); }, 0.0, std::min(H, 1.0));
    const double constant = m == 0 ? -w0p * H : 0.0;
    const double w = (m == 0 ? 1.0 : 2.0) / H;
    b.coefficients[static_cast<std::size_t>(m)] = w * (sign * windowed + constant);
  }
  if (std::abs(b.coefficients[0]) > a0_tolerance) {
    throw SolvabilityError("boundary_layer: a_0 does not vanish (profile boundary value mismatch)");
  }
  return b;
}

struct ApproximationOptions {
  std::size_t time_nodes = 64;
  ProfileOptions profile;
  int layer_modes = 0;  ///< 0 skips the boundary layers
};

/// Composite approximation P = w_0 + eps^2 u_2 on a uniform time grid.
class AsymptoticApproximation {
 public:
  AsymptoticApproximation(std::shared_ptr<const FreeBoundaryEvolution> evo, double eps,
                          ApproximationOptions opt = {})
      : evo_(std::move(evo)), eps_(eps) {
    if (!evo_) throw InvalidParameter("AsymptoticApproximation: null evolution");
    if (!(eps > 0.0)) throw InvalidParameter("AsymptoticApproximation: eps must be positive");
    if (opt.time_nodes < 2) throw InvalidParameter("AsymptoticApproximation: need >= 2 time nodes");
    times_ = quad::uniform_grid(0.0, evo_->T(), opt.time_nodes - 1);
    for (double t : times_) {
      profiles_.push_back(solve_limit_profile(*evo_, t, eps_, opt.profile));
      correctors_.push_back(solve_corrector(profiles_.back(), *evo_));
      if (opt.layer_modes > 0) {
        layers_.emplace_back(
            boundary_layer(*evo_, profiles_.back(), LayerSide::left, opt.layer_modes),
            boundary_layer(*evo_, profiles_.back(), LayerSide::right, opt.layer_modes));
      }
    }
  }

  const FreeBoundaryEvolution& evolution() const { return *evo_; }
  double eps() const { return eps_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<LimitProfile>& profiles() const { return profiles_; }
  const std::vector<CorrectorField>& correctors() const { return correctors_; }
  const std::vector<std::pair<BoundaryLayerSolution, BoundaryLayerSolution>>& layers() const {
    return layers_;
  }

  /// P at (y1, y2, t); the corrector polynomial is continued past xi = S.
  double value_unchecked(double y1, double y2, double t) const {
    const double S = evo_->S(y1, t);
    return blend(t, [&](std::size_t k) {
      return profiles_[k].value(y1) + eps_ * eps_ * correctors_[k].value_at_height(y1, y2 / eps_, S);
    });
  }
  /// (dP/dy1, dP/dy2), same continuation.
  std::pair<double, double> gradient_unchecked(double y1, double y2, double t) const {
    const double S = evo_->S(y1, t), S_y1 = evo_->S_y1(y1, t);
    const double d1 = blend(t, [&](std::size_t k) {
      return profiles_[k].slope(y1) + eps_ * eps_ * correctors_[k].d_y1_at_height(y1, y2 / eps_, S, S_y1);
    });
    const double d2 = blend(t, [&](std::size_t k) { return eps_ * correctors_[k].d_xi(y1, y2 / eps_); });
    return {d1, d2};
  }
  double frak_w0(double y1, double t) const {
    return blend(t, [&](std::size_t k) { return profiles_[k].value(y1); });
  }

 private:
  template <class F>
  double blend(double t, F&& f) const {
    if (t < -1e-12 || t > evo_->T() * (1.0 + 1e-12)) throw DomainError("approximation: t outside [0, T]");
    const double h = times_[1] - times_[0];
    auto k = static_cast<std::size_t>(std::clamp(t / h, 0.0, static_cast<double>(times_.size() - 2)));
    k = std::min(k, times_.size() - 2);
    const double s = std::clamp((t - times_[k]) / h, 0.0, 1.0);
    if (s < 1e-12) return f(k);
    if (s > 1.0 - 1e-12) return f(k + 1);
    return (1 - s) * f(k) + s * f(k + 1);
  }

  std::shared_ptr<const FreeBoundaryEvolution> evo_;
  double eps_;
  std::vector<double> times_;
  std::vector<LimitProfile> profiles_;
  std::vector<CorrectorField> correctors_;
  std::vector<std::pair<BoundaryLayerSolution, BoundaryLayerSolution>> layers_;
};

/// P^eps(y1, y2, t) = w_0(y1, t) + eps^2 u_2(y1, y2/eps, t) on Omega^eps(t).
inline double eval_composite(const AsymptoticApproximation& a, double y1, double y2, double t) {
  const double top = a.eps() * a.evolution().S(y1, t);
  if (y2 < -1e-12 * a.eps() || y2 > top * (1.0 + 1e-12)) {
    throw DomainError("eval_composite: point outside Omega^eps(t)");
  }
  return a.value_unchecked(y1, y2, t);
}

}  // namespace hsflow::asymptotics
