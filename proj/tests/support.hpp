#pragma once

#include <cmath>
#include <vector>

#include "hsflow/hsflow.hpp"

namespace testing_support {

inline hsflow::BoundaryFluxData constant_flux(double a1, double a2, double a3, double T = 0.25,
                                              double gamma = 1.0, double l = 1.0) {
  hsflow::FluxPreset p;
  p.a1 = a1;
  p.a2 = a2;
  p.a3 = a3;
  return hsflow::make_flux(p, gamma, l, T);
}

inline hsflow::BoundaryFluxData default_flux(double T = 0.25) {
  return hsflow::make_flux(hsflow::default_preset(), 1.0, 1.0, T);
}

/// Midpoint rule with n cells; deliberately unrelated to the library rules.
template <class F>
double midpoint(F&& f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += f(a + (static_cast<double>(i) + 0.5) * h);
  return s * h;
}

/// int_0^1 of the standard lateral window, by a million-cell midpoint sum.
inline double chi2_integral_oracle() {
  const auto chi = hsflow::standard_chi2();
  return midpoint([&](double x) { return chi(x); }, 0.0, 1.0, 1000000);
}

inline double observed_order(double coarse, double fine, double ratio = 2.0) {
  return std::log(coarse / fine) / std::log(ratio);
}

}  // namespace testing_support
