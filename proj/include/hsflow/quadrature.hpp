#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hsflow/errors.hpp"

namespace hsflow::quad {

/// Composite 10-point Gauss-Legendre rule on `panels` equal panels of [a, b].
template <class F>
double gauss_legendre(F&& f, double a, double b, int panels = 8) {
  if (b == a) return 0.0;
  const double w = (b - a) / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * w;
    sum += boost::math::quadrature::gauss<double, 10>::integrate(f, lo, lo + w);
  }
  return sum;
}

/// Weights of the composite Simpson rule on n uniformly spaced samples with
/// spacing h. An odd number of intervals closes with a 3/8 panel.
inline std::vector<double> simpson_weights(std::size_t n, double h) {
  if (n < 2) throw ResolutionError("simpson_weights: need at least two samples");
  std::vector<double> w(n, 0.0);
  const std::size_t intervals = n - 1;
  if (intervals == 1) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  // leading even block handled by Simpson 1/3, remainder (3 intervals) by 3/8
  const std::size_t even = (intervals % 2 == 0) ? intervals : intervals - 3;
  for (std::size_t i = 0; i + 2 <= even; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (even != intervals) {
    const std::size_t i = even;
    w[i] += 3.0 * h / 8.0;
    w[i + 1] += 9.0 * h / 8.0;
    w[i + 2] += 9.0 * h / 8.0;
    w[i + 3] += 3.0 * h / 8.0;
  }
  return w;
}

inline double simpson(std::span<const double> samples, double h) {
  const auto w = simpson_weights(samples.size(), h);
  double s = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) s += w[i] * samples[i];
  return s;
}

inline std::vector<double> trapezoid_weights(std::size_t n, double h) {
  if (n < 2) throw ResolutionError("trapezoid_weights: need at least two samples");
  std::vector<double> w(n, h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

/// Running integral of f from x_0 given nodal values and derivatives on a
/// uniform grid (corrected trapezoid, fourth order).
inline std::vector<double> cumulative_hermite(std::span<const double> f,
                                              std::span<const double> df, double h) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]) + h * h / 12.0 * (df[i - 1] - df[i]);
  }
  return out;
}

inline std::vector<double> uniform_grid(double a, double b, std::size_t intervals) {
  std::vector<double> x(intervals + 1);
  const double h = (b - a) / static_cast<double>(intervals);
  for (std::size_t i = 0; i <= intervals; ++i) x[i] = a + h * static_cast<double>(i);
  x.back() = b;
  return x;
}

}  // namespace hsflow::quad
