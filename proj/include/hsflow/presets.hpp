#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "hsflow/errors.hpp"
#include "hsflow/model.hpp"

namespace hsflow {

/// Named analytic flux families.
///
///   constant             phi_i = a_i
///   cosine_in_t          phi_i = a_i (1 + beta cos(omega t))
///   polynomial_in_space  phi_1 = a_1 (1 + b xi (1 - xi)),  phi_3 = a_3 (1 + b xi^2),
///                        phi_2 = a_2 (1 + b (y/l) (1 - y/l))
///
/// The cutoffs chi_1, chi_2 always window the data, so "constant" lateral data
/// enter the problem as chi_2-windowed constants.
struct FluxPreset {
  std::string family = "constant";
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double beta = 0.0;
  double omega = 0.0;
  double b = 0.0;

  bool operator==(const FluxPreset&) const = default;
};

inline bool is_known_family(const std::string& f) {
  return f == "constant" || f == "cosine_in_t" || f == "polynomial_in_space";
}

inline BoundaryFluxData make_flux(const FluxPreset& p, double gamma, double l, double T) {
  if (!is_known_family(p.family)) throw InvalidParameter("unknown flux family: " + p.family);
  BoundaryFluxData f;
  f.gamma = gamma;
  f.l = l;
  f.T = T;
  f.chi1 = standard_chi1(l);
  f.chi2 = standard_chi2();
  const double a1 = p.a1, a2 = p.a2, a3 = p.a3;
  if (p.family == "constant") {
    f.phi1 = [a1](double, double) { return a1; };
    f.phi2 = [a2](double, double) { return a2; };
    f.phi3 = [a3](double, double) { return a3; };
    f.phi2_dy1 = [](double, double) { return 0.0; };
  } else if (p.family == "cosine_in_t") {
    const double beta = p.beta, omega = p.omega;
    f.phi1 = [=](double, double t) { return a1 * (1.0 + beta * std::cos(omega * t)); };
    f.phi2 = [=](double, double t) { return a2 * (1.0 + beta * std::cos(omega * t)); };
    f.phi3 = [=](double, double t) { return a3 * (1.0 + beta * std::cos(omega * t)); };
    f.phi2_dy1 = [](double, double) { return 0.0; };
  } else {
    const double b = p.b;
    f.phi1 = [=](double xi, double) { return a1 * (1.0 + b * xi * (1.0 - xi)); };
    f.phi3 = [=](double xi, double) { return a3 * (1.0 + b * xi * xi); };
    f.phi2 = [=](double y, double) {
      const double s = y / l;
      return a2 * (1.0 + b * s * (1.0 - s));
    };
    f.phi2_dy1 = [=](double y, double) { return a2 * b * (1.0 - 2.0 * y / l) / l; };
  }
  f.validate();
  return f;
}

/// Default experiment preset: chi_2-windowed constant lateral inflow and a
/// positive constant bottom inflow on the chi_1 plateau.
inline FluxPreset default_preset() {
  FluxPreset p;
  p.family = "constant";
  p.a1 = 0.02;
  p.a2 = 0.4;
  p.a3 = 0.02;
  return p;
}

}  // namespace hsflow
