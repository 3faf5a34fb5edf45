#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "hsflow/errors.hpp"
#include "hsflow/model.hpp"
#include "hsflow/quadrature.hpp"

namespace hsflow::spectral {

/// neumann: -psi'' = lambda psi, psi'(0) = psi'(a) = 0
/// mixed:   -psi'' = mu psi,     psi'(0) = psi(a) = 0
enum class BasisKind { neumann, mixed };

struct EigenBasis {
  BasisKind kind = BasisKind::neumann;
  double a = 1.0;

  EigenBasis() = default;
  EigenBasis(BasisKind k, double length) : kind(k), a(length) {
    if (!(length > 0.0)) throw InvalidParameter("EigenBasis: interval length must be positive");
  }

  double frequency(int m) const {
    check_index(m);
    const double shift = kind == BasisKind::neumann ? 0.0 : 0.5;
    return std::numbers::pi * (m + shift) / a;
  }
  double eigenvalue(int m) const {
    const double z = frequency(m);
    return z * z;
  }
  double eigenfunction_at(int m, double x) const {
    check_point(x);
    if (kind == BasisKind::neumann && m == 0) return 1.0 / std::sqrt(a);
    return std::sqrt(2.0 / a) * std::cos(frequency(m) * x);
  }
  double eigenfunction_derivative(int m, double x) const {
    check_point(x);
    if (kind == BasisKind::neumann && m == 0) return 0.0;
    const double z = frequency(m);
    return -std::sqrt(2.0 / a) * z * std::sin(z * x);
  }
  /// Largest |psi_m| over [0, a].
  double sup_norm() const { return std::sqrt(2.0 / a); }
  /// First index included in decay sums (lambda_0 = 0 is skipped).
  int first_decay_index() const { return kind == BasisKind::neumann ? 1 : 0; }

 private:
  static void check_index(int m) {
    if (m < 0) throw InvalidParameter("EigenBasis: negative index");
  }
  void check_point(double x) const {
    if (x < -1e-12 * a || x > a * (1.0 + 1e-12)) throw DomainError("EigenBasis: x outside [0, a]");
  }
};

inline double eigenvalue(const EigenBasis& b, int m) { return b.eigenvalue(m); }
inline double eigenfunction_at(const EigenBasis& b, int m, double x) {
  return b.eigenfunction_at(m, x);
}

/// Truncated expansion sum_{m <= M} g_m psi_m.
struct SpectralSeries {
  EigenBasis basis;
  std::vector<double> coefficients;
  /// Estimated sup-norm of the discarded tail.
  double tail_bound = 0.0;

  int truncation() const { return static_cast<int>(coefficients.size()) - 1; }
  double evaluate(double x) const {
    double s = 0.0;
    for (std::size_t m = 0; m < coefficients.size(); ++m) {
      s += coefficients[m] * basis.eigenfunction_at(static_cast<int>(m), x);
    }
    return s;
  }
};

namespace detail {

inline double sample_spacing(std::size_t n, double a) { return a / static_cast<double>(n - 1); }

inline std::vector<double> project(std::span<const double> samples, const EigenBasis& basis,
                                   int M) {
  const std::size_t n = samples.size();
  const double h = sample_spacing(n, basis.a);
  const auto w = quad::simpson_weights(n, h);
  std::vector<double> c(static_cast<std::size_t>(M) + 1, 0.0);
  for (int m = 0; m <= M; ++m) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += w[i] * samples[i] * basis.eigenfunction_at(m, std::min(basis.a, h * static_cast<double>(i)));
    }
    c[static_cast<std::size_t>(m)] = s;
  }
  return c;
}

/// sum_{m > M} eig_m^{2p - 2}, bounded by the integral of the power law.
inline double tail_power_sum(const EigenBasis& basis, int M, double p) {
  const double e = 4.0 - 4.0 * p;  // eig^{2p-2} = (pi (m + shift) / a)^{-e}
  const double shift = basis.kind == BasisKind::neumann ? 0.0 : 0.5;
  const double x0 = std::max(0.5, M + shift);
  return std::pow(basis.a / std::numbers::pi, e) * std::pow(x0, 1.0 - e) / (e - 1.0);
}

}  // namespace detail

/// Estimate of sum_{m > M} |g_m| eig_m^p from the Parseval residual of g''.
/// Integrating by parts twice (valid when g vanishes to first order at the
/// ends) gives g_m = -g''_m / eig_m; Cauchy-Schwarz then bounds the tail by
/// ||P_{>M} g''|| * (sum_{m>M} eig_m^{2p-2})^{1/2}.
inline double tail_estimate(std::span<const double> samples, const EigenBasis& basis, int M,
                            double p) {
  const std::size_t n = samples.size();
  const double h = detail::sample_spacing(n, basis.a);
  std::vector<double> g2(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    g2[i] = (samples[i + 1] - 2.0 * samples[i] + samples[i - 1]) / (h * h);
  }
  g2[0] = 2.0 * g2[1] - g2[2];
  g2[n - 1] = 2.0 * g2[n - 2] - g2[n - 3];
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = g2[i] * g2[i];
  const double norm2 = quad::simpson(sq, h);
  const auto c2 = detail::project(g2, basis, M);
  double captured = 0.0;
  for (double c : c2) captured += c * c;
  // quadrature noise floor on the residual
  const double residual = std::max(norm2 - captured, 1e-14 * norm2);
  return std::sqrt(residual) * std::sqrt(detail::tail_power_sum(basis, M, p));
}

/// Coefficients g_m = <g, psi_m>, m = 0..M, by composite Simpson on uniform
/// samples over [0, a] (endpoints included).
inline SpectralSeries fourier_coefficients(std::span<const double> samples,
                                           const EigenBasis& basis, int M) {
  if (M < 0) throw InvalidParameter("fourier_coefficients: negative truncation");
  if (samples.size() < static_cast<std::size_t>(std::max(4 * M, 3))) {
    throw ResolutionError("fourier_coefficients: need at least 4M samples");
  }
  SpectralSeries s;
  s.basis = basis;
  s.coefficients = detail::project(samples, basis, M);
  s.tail_bound = basis.sup_norm() * tail_estimate(samples, basis, M, 0.0);
  return s;
}

/// sum_m |g_m| eig_m^{(k-1)/2}; lambda_0 = 0 is skipped for the Neumann basis.
inline double decay_report(const SpectralSeries& series, int k) {
  if (k < 0 || k > 3) throw InvalidParameter("decay_report: k must be in {0,1,2,3}");
  double s = 0.0;
  for (int m = series.basis.first_decay_index(); m <= series.truncation(); ++m) {
    const double g = series.coefficients[static_cast<std::size_t>(m)];
    if (g == 0.0) continue;
    s += std::abs(g) * std::pow(series.basis.eigenvalue(m), 0.5 * (k - 1));
  }
  return s;
}

/// p_0 = P_0 + P_1 + P_2 on [0, l] x [0, eps] for the flat initial domain.
struct InitialPressureSeries {
  double eps = 0.0;
  double l = 0.0;
  int M = 0;
  /// dP_0/dy_2 = phibar_{2,0} / sqrt(l)
  double P0_slope = 0.0;
  /// phibar_{2,m}, m = 0..M (Neumann basis on [0, l])
  std::vector<double> P1_coeffs;
  /// phibar_{1,m}, phibar_{3,m}, m = 0..M (mixed basis on [0, eps])
  std::vector<double> P2_coeffs_left;
  std::vector<double> P2_coeffs_right;
  double value_tail_bound = 0.0;
  double gradient_tail_bound = 0.0;
  /// Set when the gradient tail bound exceeds the requested tolerance.
  bool truncation_warning = false;

  EigenBasis basis_y1() const { return {BasisKind::neumann, l}; }
  EigenBasis basis_y2() const { return {BasisKind::mixed, eps}; }
};

struct InitialPressureOptions {
  /// Samples per coefficient integral (odd count recommended).
  std::size_t samples = 4097;
  /// Gradient tail tolerance that triggers `truncation_warning`.
  double tail_tolerance = 1e-6;
};

inline InitialPressureSeries build_initial_pressure(const BoundaryFluxData& flux, double eps,
                                                    int M, InitialPressureOptions opt = {}) {
  flux.validate();
  if (M < 8) throw InvalidParameter("build_initial_pressure: M must be at least 8");
  if (!(eps > 0.0)) throw InvalidParameter("build_initial_pressure: eps must be positive");
  const std::size_t n = std::max<std::size_t>(opt.samples, 4 * static_cast<std::size_t>(M) + 1);

  InitialPressureSeries s;
  s.eps = eps;
  s.l = flux.l;
  s.M = M;
  const EigenBasis by1 = s.basis_y1();
  const EigenBasis by2 = s.basis_y2();

  std::vector<double> f1(n), f2(n), f3(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y2 = eps * static_cast<double>(i) / static_cast<double>(n - 1);
    const double y1 = flux.l * static_cast<double>(i) / static_cast<double>(n - 1);
    f1[i] = -eval_phi_eps(flux, eps, Side::left, y2, 0.0);
    f3[i] = eval_phi_eps(flux, eps, Side::right, y2, 0.0);
    f2[i] = -eval_phi_eps(flux, eps, Side::bottom, y1, 0.0);
  }
  s.P1_coeffs = detail::project(f2, by1, M);
  s.P2_coeffs_left = detail::project(f1, by2, M);
  s.P2_coeffs_right = detail::project(f3, by2, M);
  s.P0_slope = s.P1_coeffs[0] / std::sqrt(flux.l);

  // hyperbolic ratios are bounded by 1 (P_1) and coth(l sqrt(mu_0)) (P_2)
  const double coth0 = 1.0 / std::tanh(flux.l * by2.frequency(0));
  const double t1v = tail_estimate(f2, by1, M, -0.5);
  const double t1g = tail_estimate(f2, by1, M, 0.0);
  const double t2v = tail_estimate(f1, by2, M, -0.5) + tail_estimate(f3, by2, M, -0.5);
  const double t2g = tail_estimate(f1, by2, M, 0.0) + tail_estimate(f3, by2, M, 0.0);
  s.value_tail_bound = by1.sup_norm() * t1v + by2.sup_norm() * coth0 * t2v;
  s.gradient_tail_bound = by1.sup_norm() * t1g + by2.sup_norm() * coth0 * t2g;
  s.truncation_warning = s.gradient_tail_bound > opt.tail_tolerance;
  return s;
}

namespace detail {

// sinh((y2 - eps) z) / cosh(eps z) and cosh((y2 - eps) z) / cosh(eps z)
inline std::pair<double, double> depth_ratios(double y2, double eps, double z) {
  const double den = 1.0 + std::exp(-2.0 * eps * z);
  const double a = std::exp(-y2 * z);
  const double b = std::exp(-(2.0 * eps - y2) * z);
  return {-(a - b) / den, (a + b) / den};
}

// cosh(x z) / sinh(l z) and sinh(x z) / sinh(l z)
inline std::pair<double, double> length_ratios(double x, double l, double z) {
  const double den = -std::expm1(-2.0 * l * z);
  const double a = std::exp((x - l) * z);
  const double b = std::exp(-(x + l) * z);
  return {(a + b) / den, (a - b) / den};
}

inline void check_rectangle(const InitialPressureSeries& s, double y1, double y2) {
  const double tol = 1e-12;
  if (y1 < -tol * s.l || y1 > s.l * (1 + tol) || y2 < -tol * s.eps || y2 > s.eps * (1 + tol)) {
    throw DomainError("p0: point outside [0, l] x [0, eps]");
  }
}

}  // namespace detail

struct Gradient {
  double d1 = 0.0;
  double d2 = 0.0;
};

inline double eval_p0(const InitialPressureSeries& s, double y1, double y2) {
  detail::check_rectangle(s, y1, y2);
  y1 = std::clamp(y1, 0.0, s.l);
  y2 = std::clamp(y2, 0.0, s.eps);
  const EigenBasis by1 = s.basis_y1();
  const EigenBasis by2 = s.basis_y2();
  double p = s.P0_slope * (y2 - s.eps);
  for (int m = 1; m <= s.M; ++m) {
    const double c = s.P1_coeffs[static_cast<std::size_t>(m)];
    if (c == 0.0) continue;
    const double z = by1.frequency(m);
    p += c / z * detail::depth_ratios(y2, s.eps, z).first * by1.eigenfunction_at(m, y1);
  }
  for (int m = 0; m <= s.M; ++m) {
    const double r = s.P2_coeffs_right[static_cast<std::size_t>(m)];
    const double lft = s.P2_coeffs_left[static_cast<std::size_t>(m)];
    if (r == 0.0 && lft == 0.0) continue;
    const double z = by2.frequency(m);
    const double amp = r * detail::length_ratios(y1, s.l, z).first -
                       lft * detail::length_ratios(s.l - y1, s.l, z).first;
    p += amp / z * by2.eigenfunction_at(m, y2);
  }
  return p;
}

inline Gradient grad_p0(const InitialPressureSeries& s, double y1, double y2) {
  detail::check_rectangle(s, y1, y2);
  y1 = std::clamp(y1, 0.0, s.l);
  y2 = std::clamp(y2, 0.0, s.eps);
  const EigenBasis by1 = s.basis_y1();
  const EigenBasis by2 = s.basis_y2();
  Gradient g{0.0, s.P0_slope};
  for (int m = 1; m <= s.M; ++m) {
    const double c = s.P1_coeffs[static_cast<std::size_t>(m)];
    if (c == 0.0) continue;
    const double z = by1.frequency(m);
    const auto [sh, ch] = detail::depth_ratios(y2, s.eps, z);
    g.d1 += c / z * sh * by1.eigenfunction_derivative(m, y1);
    g.d2 += c * ch * by1.eigenfunction_at(m, y1);
  }
  for (int m = 0; m <= s.M; ++m) {
    const double r = s.P2_coeffs_right[static_cast<std::size_t>(m)];
    const double lft = s.P2_coeffs_left[static_cast<std::size_t>(m)];
    if (r == 0.0 && lft == 0.0) continue;
    const double z = by2.frequency(m);
    const auto [cr, sr] = detail::length_ratios(y1, s.l, z);
    const auto [cl, sl] = detail::length_ratios(s.l - y1, s.l, z);
    g.d1 += (r * sr + lft * sl) * by2.eigenfunction_at(m, y2);
    g.d2 += (r * cr - lft * cl) / z * by2.eigenfunction_derivative(m, y2);
  }
  return g;
}

/// dp_0/dy_2 on the initial free boundary y_2 = eps: the left side of the
/// initial-speed sign condition. Negative everywhere means positive initial
/// boundary velocity.
inline double initial_top_slope(const InitialPressureSeries& s, double y1) {
  return grad_p0(s, y1, s.eps).d2;
}

}  // namespace hsflow::spectral
