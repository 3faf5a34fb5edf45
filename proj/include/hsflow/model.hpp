#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hsflow/errors.hpp"
#include "hsflow/quadrature.hpp"

namespace hsflow {

/// exp(-1/x)-based C-infinity transition: 0 for x <= 0, 1 for x >= 1, and
/// s(x) + s(1 - x) = 1.
inline double smooth_ramp(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

inline double smooth_ramp_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  const double den = a + b;
  if (den == 0.0) return 0.0;
  const double da = a / (x * x);
  const double db = -b / ((1.0 - x) * (1.0 - x));
  return (da * b - a * db) / (den * den);
}

/// Smooth bump: 0 outside (support_lo, support_hi), 1 on [plateau_lo, plateau_hi].
class CutoffFunction {
 public:
  CutoffFunction() = default;
  CutoffFunction(double support_lo, double plateau_lo, double plateau_hi, double support_hi)
      : support_lo_(support_lo), plateau_lo_(plateau_lo), plateau_hi_(plateau_hi),
        support_hi_(support_hi) {
    if (!(support_lo < plateau_lo && plateau_lo < plateau_hi && plateau_hi < support_hi)) {
      throw InvalidParameter("cutoff: need support_lo < plateau_lo < plateau_hi < support_hi");
    }
  }

  double operator()(double x) const {
    if (x <= support_lo_ || x >= support_hi_) return 0.0;
    if (x >= plateau_lo_ && x <= plateau_hi_) return 1.0;
    if (x < plateau_lo_) return smooth_ramp((x - support_lo_) / (plateau_lo_ - support_lo_));
    return smooth_ramp((support_hi_ - x) / (support_hi_ - plateau_hi_));
  }

  double derivative(double x) const {
    if (x <= support_lo_ || x >= support_hi_) return 0.0;
    if (x >= plateau_lo_ && x <= plateau_hi_) return 0.0;
    if (x < plateau_lo_) {
      const double w = plateau_lo_ - support_lo_;
      return smooth_ramp_derivative((x - support_lo_) / w) / w;
    }
    const double w = support_hi_ - plateau_hi_;
    return -smooth_ramp_derivative((support_hi_ - x) / w) / w;
  }

  double support_lo() const { return support_lo_; }
  double plateau_lo() const { return plateau_lo_; }
  double plateau_hi() const { return plateau_hi_; }
  double support_hi() const { return support_hi_; }

  /// Integral of chi * g over [lo, hi], with panels aligned to the ramps.
  template <class G>
  double integrate_product(G&& g, double lo, double hi, int panels_per_piece = 16) const {
    const double breaks[4] = {support_lo_, plateau_lo_, plateau_hi_, support_hi_};
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double a = std::max(lo, breaks[k]);
      const double b = std::min(hi, breaks[k + 1]);
      if (b <= a) continue;
      sum += quad::gauss_legendre([&](double x) { return (*this)(x) * g(x); }, a, b,
                                  panels_per_piece);
    }
    return sum;
  }

 private:
  double support_lo_ = 0.2, plateau_lo_ = 0.4, plateau_hi_ = 0.6, support_hi_ = 0.8;
};

inline CutoffFunction build_cutoff(double support_lo, double plateau_lo, double plateau_hi,
                                   double support_hi) {
  return CutoffFunction(support_lo, plateau_lo, plateau_hi, support_hi);
}

/// chi_1 on [0, l]: support (l/5, 4l/5), plateau [2l/5, 3l/5].
inline CutoffFunction standard_chi1(double l) {
  return CutoffFunction(l / 5.0, 2.0 * l / 5.0, 3.0 * l / 5.0, 4.0 * l / 5.0);
}

/// chi_2 on [0, 1]: support (1/5, 4/5), plateau [2/5, 3/5].
inline CutoffFunction standard_chi2() { return CutoffFunction(0.2, 0.4, 0.6, 0.8); }

using SpaceTimeFn = std::function<double(double, double)>;

/// Boundary flux data (phi_1, phi_2, phi_3) with cutoffs and the constants gamma, l, T.
/// phi_1, phi_3 take (xi_2, t) with xi_2 in [0, 1]; phi_2 takes (y_1, t).
struct BoundaryFluxData {
  SpaceTimeFn phi1;
  SpaceTimeFn phi2;
  SpaceTimeFn phi3;
  /// d phi_2 / d y_1; a central difference is used when empty.
  SpaceTimeFn phi2_dy1;
  CutoffFunction chi1;
  CutoffFunction chi2;
  double gamma = 1.0;
  double l = 1.0;
  double T = 1.0;

  void validate() const {
    if (!phi1 || !phi2 || !phi3) throw InvalidParameter("flux: phi1, phi2, phi3 must be set");
    if (!(gamma > 0.0) || !(l > 0.0) || !(T > 0.0)) {
      throw InvalidParameter("flux: gamma, l and T must be positive");
    }
  }

  double chi1_phi2(double y1, double t) const {
    const double c = chi1(y1);
    return c == 0.0 ? 0.0 : c * phi2(y1, t);
  }
  double chi2_phi1(double xi, double t) const {
    const double c = chi2(xi);
    return c == 0.0 ? 0.0 : c * phi1(xi, t);
  }
  double chi2_phi3(double xi, double t) const {
    const double c = chi2(xi);
    return c == 0.0 ? 0.0 : c * phi3(xi, t);
  }

  /// d(chi_1 phi_2)/dy_1
  double d_chi1_phi2(double y1, double t) const {
    const double c = chi1(y1);
    const double dc = chi1.derivative(y1);
    if (c == 0.0 && dc == 0.0) return 0.0;
    double dphi;
    if (phi2_dy1) {
      dphi = phi2_dy1(y1, t);
    } else {
      const double h = 1e-6 * l;
      dphi = (phi2(y1 + h, t) - phi2(y1 - h, t)) / (2.0 * h);
    }
    return dc * phi2(y1, t) + c * dphi;
  }

  /// Integrals over xi_2 in [0, upper] of chi_2 phi_1 and chi_2 phi_3.
  double lateral_integral_left(double t, double upper = 1.0) const {
    return chi2.integrate_product([&](double x) { return phi1(x, t); }, 0.0, upper);
  }
  double lateral_integral_right(double t, double upper = 1.0) const {
    return chi2.integrate_product([&](double x) { return phi3(x, t); }, 0.0, upper);
  }
  /// Integral over y_1 in [0, l] of chi_1 phi_2.
  double bottom_integral(double t) const {
    return chi1.integrate_product([&](double y) { return phi2(y, t); }, 0.0, l);
  }
};

enum class Side { left, bottom, right };

inline std::string to_string(Side s) {
  switch (s) {
    case Side::left: return "left";
    case Side::bottom: return "bottom";
    case Side::right: return "right";
  }
  return "?";
}

/// Neumann datum Phi^eps on the fixed boundary. `coord` is y_2 on the lateral
/// walls (0 <= y_2 <= 6 eps / 5) and y_1 on the bottom.
inline double eval_phi_eps(const BoundaryFluxData& flux, double eps, Side side, double coord,
                           double t) {
  constexpr double slack = 1e-12;
  if (t < -slack * flux.T || t > flux.T * (1.0 + slack)) {
    throw DomainError("eval_phi_eps: t outside [0, T]");
  }
  double v = 0.0;
  if (side == Side::bottom) {
    if (coord < -slack * flux.l || coord > flux.l * (1.0 + slack)) {
      throw DomainError("eval_phi_eps: y1 outside [0, l]");
    }
    v = eps * flux.chi1_phi2(coord, t);
  } else {
    if (coord < -slack * eps || coord > 1.2 * eps * (1.0 + slack)) {
      throw DomainError("eval_phi_eps: y2 outside [0, 6 eps/5]");
    }
    const double xi = coord / eps;
    v = side == Side::left ? flux.chi2_phi1(xi, t) : flux.chi2_phi3(xi, t);
  }
  if (!std::isfinite(v)) throw EvaluationError("eval_phi_eps: non-finite flux value");
  return v;
}

/// Sampled free-boundary height factor S(y_1, t); the boundary is y_2 = eps S.
struct FreeBoundaryState {
  std::vector<double> y1_grid;
  std::vector<double> S_values;
  double t = 0.0;
  double eps = 0.0;

  FreeBoundaryState() = default;
  FreeBoundaryState(std::vector<double> grid, std::vector<double> S, double time, double e)
      : y1_grid(std::move(grid)), S_values(std::move(S)), t(time), eps(e) {
    if (y1_grid.size() != S_values.size() || y1_grid.size() < 2) {
      throw InvalidParameter("FreeBoundaryState: grid and values must match (>= 2 nodes)");
    }
    if (!(eps > 0.0)) throw InvalidParameter("FreeBoundaryState: eps must be positive");
  }

  /// Flat initial boundary S = 1 on a uniform grid with `intervals` cells.
  static FreeBoundaryState flat(double l, std::size_t intervals, double eps) {
    auto grid = quad::uniform_grid(0.0, l, intervals);
    std::vector<double> S(grid.size(), 1.0);
    return FreeBoundaryState(std::move(grid), std::move(S), 0.0, eps);
  }

  std::size_t size() const { return S_values.size(); }
  double spacing() const { return y1_grid[1] - y1_grid[0]; }
  double max_deviation() const {
    double m = 0.0;
    for (double s : S_values) m = std::max(m, std::abs(s - 1.0));
    return m;
  }
  /// |S - 1| < 1/5 at every node.
  bool within_bounds() const { return max_deviation() < 0.2; }
  double rho(std::size_t i) const { return eps * (S_values[i] - 1.0); }

  /// dS/dy_1 at every node: central differences inside, second-order
  /// one-sided at the ends.
  std::vector<double> slope() const {
    const std::size_t n = S_values.size();
    const double h = spacing();
    std::vector<double> d(n);
    if (n == 2) {
      d[0] = d[1] = (S_values[1] - S_values[0]) / h;
      return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (S_values[i + 1] - S_values[i - 1]) / (2 * h);
    d[0] = (-3 * S_values[0] + 4 * S_values[1] - S_values[2]) / (2 * h);
    d[n - 1] = (3 * S_values[n - 1] - 4 * S_values[n - 2] + S_values[n - 3]) / (2 * h);
    return d;
  }
};

}  // namespace hsflow
