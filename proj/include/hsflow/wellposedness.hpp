#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "hsflow/asymptotics.hpp"
#include "hsflow/errors.hpp"
#include "hsflow/model.hpp"
#include "hsflow/quadrature.hpp"
#include "hsflow/spectral.hpp"

namespace hsflow {

struct WellPosednessOptions {
  int M = 64;
  std::size_t n_y1 = 256;
  std::size_t n_t = 64;
  std::size_t samples = 4097;
};

struct WellPosednessReport {
  /// min over t of int chi_2 phi_1 + int chi_1 phi_2 + int chi_2 phi_3 (total inflow must be positive)
  double necessary_integral_min = 0.0;
  /// max over y_1 of dp_0/dy_2 (y_1, eps) from the truncated series (must be negative)
  double top_slope_max = 0.0;
  double top_slope_tail_bound = 0.0;
  /// min over (y_1, t) of chi_1 phi_2 + h_0 (growth of S)
  double monotone_growth_min = 0.0;
  bool verdict = false;
  /// The sign of top_slope_max is not resolved by the truncation.
  bool indeterminate = false;
};

inline WellPosednessReport validate_wellposedness(const BoundaryFluxData& flux, double eps,
                                                  WellPosednessOptions opt = {}) {
  flux.validate();
  if (opt.n_y1 < 2 || opt.n_t < 2) throw InvalidParameter("validate_wellposedness: grids need >= 2 points");
  WellPosednessReport r;
  const auto ts = quad::uniform_grid(0.0, flux.T, opt.n_t - 1);
  const auto ys = quad::uniform_grid(0.0, flux.l, opt.n_y1 - 1);

  r.necessary_integral_min = std::numeric_limits<double>::infinity();
  r.monotone_growth_min = std::numeric_limits<double>::infinity();
  for (double t : ts) {
    const double L = flux.lateral_integral_left(t), R = flux.lateral_integral_right(t);
    const double B = flux.bottom_integral(t);
    if (!std::isfinite(L + R + B)) throw EvaluationError("validate_wellposedness: non-finite flux integral");
    r.necessary_integral_min = std::min(r.necessary_integral_min, L + B + R);
    const double h0 = (L + R) / flux.l;
    for (double y : ys) {
      const double v = flux.chi1_phi2(y, t) + h0;
      if (!std::isfinite(v)) throw EvaluationError("validate_wellposedness: non-finite flux value");
      r.monotone_growth_min = std::min(r.monotone_growth_min, v);
    }
  }

  spectral::InitialPressureOptions po;
  po.samples = opt.samples;
  const auto series = spectral::build_initial_pressure(flux, eps, opt.M, po);
  r.top_slope_max = -std::numeric_limits<double>::infinity();
  for (double y : ys) {
    r.top_slope_max = std::max(r.top_slope_max, spectral::initial_top_slope(series, y));
  }
  r.top_slope_tail_bound = series.gradient_tail_bound;
  r.indeterminate = std::abs(r.top_slope_max) <= r.top_slope_tail_bound;
  r.verdict = r.necessary_integral_min > 0.0 && r.top_slope_max < 0.0 && r.monotone_growth_min > 0.0;
  return r;
}

}  // namespace hsflow
