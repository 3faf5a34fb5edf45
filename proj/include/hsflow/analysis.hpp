#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hsflow/asymptotics.hpp"
#include "hsflow/errors.hpp"
#include "hsflow/quadrature.hpp"
#include "hsflow/reference_solver.hpp"

namespace hsflow::analysis {

struct ErrorRecord {
  double eps = 0.0;
  std::size_t n1 = 0, n2 = 0;
  std::vector<double> times;
  std::vector<double> h1_by_t;
  std::vector<double> mid_by_t;
  double sup_t_H1 = 0.0;
  double sup_t_L2_mid = 0.0;
  /// false when the reference run aborted before T
  bool completed = true;
};

struct RateFit {
  std::vector<double> eps_list;
  std::vector<double> error_list;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

namespace detail {

inline void check_pair(const solver::MappedPressureGrid& g, double eps, double t, double T) {
  if (std::abs(g.eps - eps) > 1e-12 * eps) throw PairingError("grid and approximation differ in eps");
  if (t < -1e-12 || t > T * (1 + 1e-12)) throw PairingError("grid time outside the approximation range");
}

/// Tensor trapezoid weights on the mapped grid, including the Jacobian eps S.
inline std::vector<double> cell_weights(const solver::MappedPressureGrid& g) {
  const auto w1 = quad::trapezoid_weights(g.n1 + 1, g.h1());
  const auto w2 = quad::trapezoid_weights(g.n2 + 1, g.h2());
  std::vector<double> w((g.n1 + 1) * (g.n2 + 1));
  for (std::size_t i = 0; i <= g.n1; ++i) {
    const double J = g.eps * g.S_snapshot.S_values[i];
    for (std::size_t j = 0; j <= g.n2; ++j) w[i * (g.n2 + 1) + j] = w1[i] * w2[j] * J;
  }
  return w;
}

}  // namespace detail

/// Squared L2 norm and squared gradient norm over Omega^eps(t) of a nodal field
/// on the grid geometry (mapped trapezoid with Jacobian eps S).
struct FieldNorms {
  double l2_sq = 0.0;
  double grad_sq = 0.0;
};

inline FieldNorms field_norms(const solver::MappedPressureGrid& geometry, const std::vector<double>& f) {
  solver::MappedPressureGrid g = geometry;
  g.p_values = f;
  const auto w = detail::cell_weights(g);
  const auto Sy = g.S_snapshot.slope();
  FieldNorms n;
  for (std::size_t i = 0; i <= g.n1; ++i) {
    for (std::size_t j = 0; j <= g.n2; ++j) {
      const std::size_t k = i * (g.n2 + 1) + j;
      const auto [d1, d2] = g.physical_gradient(i, j, Sy);
      n.l2_sq += w[k] * f[k] * f[k];
      n.grad_sq += w[k] * (d1 * d1 + d2 * d2);
    }
  }
  return n;
}

/// Discrete H^1 norm of a nodal field: a norm on nodal values, so the
/// distance between two fields vanishes iff they agree at every node.
inline double h1_norm(const solver::MappedPressureGrid& geometry, const std::vector<double>& f) {
  const auto n = field_norms(geometry, f);
  return std::sqrt(n.l2_sq + n.grad_sq);
}

/// ||p - P||_{H^1(Omega^eps(t))}; grad p by differences on the mapped grid,
/// grad P analytically. The corrector polynomial is continued past xi = S
/// where the reference boundary lies above the asymptotic one.
inline double h1_error(const solver::MappedPressureGrid& g,
                       const asymptotics::AsymptoticApproximation& approx) {
  detail::check_pair(g, approx.eps(), g.t, approx.evolution().T());
  const auto w = detail::cell_weights(g);
  const auto Sy = g.S_snapshot.slope();
  double sum = 0.0;
  for (std::size_t i = 0; i <= g.n1; ++i) {
    const double y1 = g.y1(i);
    for (std::size_t j = 0; j <= g.n2; ++j) {
      const std::size_t k = i * (g.n2 + 1) + j;
      const double y2 = g.y2(i, j);
      const double W = g.p_values[k] - approx.value_unchecked(y1, y2, g.t);
      const auto [p1, p2] = g.physical_gradient(i, j, Sy);
      const auto [a1, a2] = approx.gradient_unchecked(y1, y2, g.t);
      sum += w[k] * (W * W + (p1 - a1) * (p1 - a1) + (p2 - a2) * (p2 - a2));
    }
  }
  return std::sqrt(sum);
}

/// Middle value <<p>>_{eps S}(y_1) per grid column (Simpson in eta).
inline std::vector<double> column_means(const solver::MappedPressureGrid& g) {
  std::vector<double> m(g.n1 + 1);
  for (std::size_t i = 0; i <= g.n1; ++i) {
    std::vector<double> col(g.n2 + 1);
    for (std::size_t j = 0; j <= g.n2; ++j) col[j] = g.at(i, j);
    m[i] = quad::simpson(col, g.h2());
  }
  return m;
}

/// || <<p>>_{eps S} - w_0 ||_{L2(0, l)} with w_0 supplied per column.
template <class W0>
double midvalue_error_with(const solver::MappedPressureGrid& g, W0&& w0) {
  const auto m = column_means(g);
  std::vector<double> sq(m.size());
  for (std::size_t i = 0; i <= g.n1; ++i) {
    const double d = m[i] - w0(g.y1(i));
    sq[i] = d * d;
  }
  return std::sqrt(quad::simpson(sq, g.h1()));
}

inline double midvalue_error(const solver::MappedPressureGrid& g, const asymptotics::LimitProfile& profile) {
  if (std::abs(g.eps - profile.eps) > 1e-12 * g.eps || std::abs(g.t - profile.t) > 1e-12) {
    throw PairingError("midvalue_error: grid and profile differ in (eps, t)");
  }
  return midvalue_error_with(g, [&](double y1) { return profile.value(y1); });
}

inline double midvalue_error(const solver::MappedPressureGrid& g,
                             const asymptotics::AsymptoticApproximation& approx) {
  detail::check_pair(g, approx.eps(), g.t, approx.evolution().T());
  return midvalue_error_with(g, [&](double y1) { return approx.frak_w0(y1, g.t); });
}

/// Arc-length mean of a nodal field over the top row eta = 1.
inline double gamma_mean(const solver::MappedPressureGrid& g, const std::vector<double>& f) {
  const auto Sy = g.S_snapshot.slope();
  const auto w = quad::trapezoid_weights(g.n1 + 1, g.h1());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i <= g.n1; ++i) {
    const double ds = std::sqrt(1.0 + g.eps * g.eps * Sy[i] * Sy[i]);
    num += w[i] * ds * f[i * (g.n2 + 1) + g.n2];
    den += w[i] * ds;
  }
  return num / den;
}

struct PoincareResult {
  double ratio = 0.0;
  bool zero_gradient = false;
  bool nonzero_gamma_mean = false;
  double gamma_mean = 0.0;

  bool usable() const { return !zero_gradient && !nonzero_gamma_mean; }
};

/// ||f||_{L2} / ||grad f||_{L2} over Omega^eps(t). Fields whose Gamma-mean is
/// not zero (relative to max |f|) or whose gradient vanishes are flagged.
inline PoincareResult poincare_diagnostic(const solver::MappedPressureGrid& geometry,
                                          const std::vector<double>& f, double mean_tolerance = 1e-8) {
  PoincareResult r;
  double fmax = 0.0;
  for (double v : f) fmax = std::max(fmax, std::abs(v));
  r.gamma_mean = gamma_mean(geometry, f);
  if (fmax > 0.0 && std::abs(r.gamma_mean) > mean_tolerance * fmax) r.nonzero_gamma_mean = true;
  const auto n = field_norms(geometry, f);
  if (!(n.grad_sq > 1e-300)) {
    r.zero_gradient = true;
    return r;
  }
  r.ratio = std::sqrt(n.l2_sq / n.grad_sq);
  return r;
}

inline PoincareResult poincare_diagnostic(const solver::MappedPressureGrid& g) {
  return poincare_diagnostic(g, g.p_values);
}

/// W = p - P on the grid nodes with its Gamma-mean removed.
inline std::vector<double> mean_free_error_field(const solver::MappedPressureGrid& g,
                                                 const asymptotics::AsymptoticApproximation& approx) {
  detail::check_pair(g, approx.eps(), g.t, approx.evolution().T());
  std::vector<double> W(g.p_values.size());
  for (std::size_t i = 0; i <= g.n1; ++i) {
    for (std::size_t j = 0; j <= g.n2; ++j) {
      const std::size_t k = i * (g.n2 + 1) + j;
      W[k] = g.p_values[k] - approx.value_unchecked(g.y1(i), g.y2(i, j), g.t);
    }
  }
  const double m = gamma_mean(g, W);
  for (double& v : W) v -= m;
  return W;
}

struct Residuals {
  double R1_sup = 0.0;  ///< sup over Omega of |eps^2 d^2u_2/dy_1^2|
  double R2_sup = 0.0;  ///< sup over Gamma of |eps^3 S_y1 du_2/dy_1|
};

/// Residual sup-norms of the composite at a stored time node; y_1-derivatives
/// of u_2 at fixed xi by differences of the stored coefficients.
inline Residuals residual_diagnostics(const asymptotics::AsymptoticApproximation& approx, double t,
                                      std::size_t xi_samples = 33) {
  const auto& times = approx.times();
  const auto it = std::find_if(times.begin(), times.end(),
                               [&](double s) { return std::abs(s - t) <= 1e-12 * std::max(1.0, t); });
  if (it == times.end()) throw PairingError("residual_diagnostics: t is not a stored time node");
  const auto k = static_cast<std::size_t>(it - times.begin());
  const auto& c = approx.correctors()[k];
  const auto& p = approx.profiles()[k];
  const double eps = approx.eps();
  const std::size_t n = c.y1_grid.size();
  const double h = c.y1_grid[1] - c.y1_grid[0];
  Residuals r;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double A2 = (c.A[i + 1] - 2 * c.A[i] + c.A[i - 1]) / (h * h);
    const double B2 = (c.B[i + 1] - 2 * c.B[i] + c.B[i - 1]) / (h * h);
    const double C2 = (c.C[i + 1] - 2 * c.C[i] + c.C[i - 1]) / (h * h);
    const double S = c.S_values[i];
    for (std::size_t q = 0; q < xi_samples; ++q) {
      const double xi = S * static_cast<double>(q) / static_cast<double>(xi_samples - 1);
      r.R1_sup = std::max(r.R1_sup, eps * eps * std::abs((A2 * xi + B2) * xi + C2));
    }
    const double A1 = (c.A[i + 1] - c.A[i - 1]) / (2 * h);
    const double B1 = (c.B[i + 1] - c.B[i - 1]) / (2 * h);
    const double C1 = (c.C[i + 1] - c.C[i - 1]) / (2 * h);
    const double du = (A1 * S + B1) * S + C1;
    r.R2_sup = std::max(r.R2_sup, eps * eps * eps * std::abs(p.S_y1_values[i] * du));
  }
  return r;
}

/// Least-squares fit of log(error) against log(eps).
inline RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& err) {
  if (eps.size() != err.size()) throw InvalidParameter("fit_rate: size mismatch");
  if (eps.size() < 3) throw InsufficientData("fit_rate: need at least 3 points");
  const auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
  if (*hi < 4.0 * *lo * (1 - 1e-12)) throw InsufficientData("fit_rate: eps values must span a factor of 4");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !(err[i] > 0.0)) throw InvalidParameter("fit_rate: values must be positive");
  }
  const double n = static_cast<double>(eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double x = std::log(eps[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  RateFit f;
  f.eps_list = eps;
  f.error_list = err;
  const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r_squared = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
  return f;
}

enum class Metric { H1, mid };

inline RateFit fit_rate(const std::vector<ErrorRecord>& records, Metric which) {
  std::vector<double> e, v;
  for (const auto& r : records) {
    if (!r.completed) continue;
    e.push_back(r.eps);
    v.push_back(which == Metric::H1 ? r.sup_t_H1 : r.sup_t_L2_mid);
  }
  return fit_rate(e, v);
}

}  // namespace hsflow::analysis
