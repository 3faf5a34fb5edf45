#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace hsflow;
using namespace hsflow::spectral;
using testing_support::constant_flux;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> sample(double a, std::size_t n, const std::function<double(double)>& g) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = g(a * static_cast<double>(i) / static_cast<double>(n - 1));
  return s;
}

// Closed-form eigenfunctions, written out independently of EigenBasis.
double psi_oracle(BasisKind kind, double a, int m, double x) {
  if (kind == BasisKind::neumann) return m == 0 ? 1.0 / std::sqrt(a) : std::sqrt(2.0 / a) * std::cos(m * pi * x / a);
  return std::sqrt(2.0 / a) * std::cos((m + 0.5) * pi * x / a);
}

}  // namespace

TEST(EigenBasisTest, ClosedFormValues) {
  EXPECT_NEAR(eigenvalue(EigenBasis{BasisKind::neumann, 1.0}, 1), 9.8696044, 1e-7);
  EXPECT_NEAR(eigenvalue(EigenBasis{BasisKind::mixed, 1.0}, 0), 2.4674011, 1e-7);
  for (double x : {0.0, 0.3, 1.0}) EXPECT_DOUBLE_EQ(eigenfunction_at(EigenBasis{BasisKind::neumann, 1.0}, 0, x), 1.0);
  const EigenBasis b{BasisKind::mixed, 0.3};
  for (int m : {0, 3, 17}) {
    EXPECT_NEAR(b.eigenvalue(m), std::pow((m + 0.5) * pi / 0.3, 2), 1e-9 * b.eigenvalue(m));
    EXPECT_NEAR(b.eigenfunction_at(m, 0.1), psi_oracle(BasisKind::mixed, 0.3, m, 0.1), 1e-13);
  }
  EXPECT_THROW(b.eigenfunction_at(0, 0.4), DomainError);
}

TEST(EigenBasisTest, GramMatrixIsIdentity) {
  const std::size_t n = 4097;
  for (auto kind : {BasisKind::neumann, BasisKind::mixed}) {
    for (double a : {1.0, 0.1}) {
      const EigenBasis b{kind, a};
      const double h = a / static_cast<double>(n - 1);
      const auto w = quad::simpson_weights(n, h);
      for (int p = 0; p < 16; ++p) {
        for (int q = 0; q < 16; ++q) {
          double g = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const double x = std::min(a, h * static_cast<double>(i));
            g += w[i] * b.eigenfunction_at(p, x) * b.eigenfunction_at(q, x);
          }
          ASSERT_NEAR(g, p == q ? 1.0 : 0.0, 1e-8) << "p=" << p << " q=" << q;
        }
      }
    }
  }
}

TEST(FourierCoefficients, EigenfunctionProjectsToUnitVector) {
  const EigenBasis b{BasisKind::neumann, 1.0};
  const auto s = fourier_coefficients(sample(1.0, 4097, [&](double x) { return b.eigenfunction_at(2, x); }), b, 16);
  for (int m = 0; m <= 16; ++m) EXPECT_NEAR(s.coefficients[m], m == 2 ? 1.0 : 0.0, 1e-10);
}

TEST(FourierCoefficients, ZeroDataGivesZeroSeries) {
  const EigenBasis b{BasisKind::mixed, 1.0};
  const auto s = fourier_coefficients(std::vector<double>(257, 0.0), b, 32);
  for (double c : s.coefficients) EXPECT_EQ(c, 0.0);
  for (int k = 0; k <= 3; ++k) EXPECT_EQ(decay_report(s, k), 0.0);
}

TEST(FourierCoefficients, WindowedCosineMatchesDenseQuadrature) {
  const auto chi = standard_chi2();
  auto g = [&](double x) { return chi(x) * std::cos(3.0 * x); };
  for (auto kind : {BasisKind::neumann, BasisKind::mixed}) {
    const EigenBasis b{kind, 1.0};
    const auto s = fourier_coefficients(sample(1.0, 8193, g), b, 24);
    for (int m = 0; m <= 24; ++m) {
      const double oracle =
          testing_support::midpoint([&](double x) { return g(x) * psi_oracle(kind, 1.0, m, x); }, 0.0, 1.0, 1000000);
      ASSERT_NEAR(s.coefficients[m], oracle, 1e-8) << "m=" << m;
    }
  }
}

TEST(FourierCoefficients, ParsevalConsistency) {
  const EigenBasis b{BasisKind::mixed, 1.0};
  auto g = [](double x) { return std::exp(x) * (1.0 - x); };
  const auto samples = sample(1.0, 4097, g);
  const auto s = fourier_coefficients(samples, b, 64);
  double sum = 0.0;
  for (double c : s.coefficients) sum += c * c;
  const double norm2 = testing_support::midpoint([&](double x) { return g(x) * g(x); }, 0.0, 1.0, 1000000);
  EXPECT_LE(sum, norm2 + 1e-10);
}

TEST(FourierCoefficients, TooFewSamplesIsAResolutionError) {
  const EigenBasis b{BasisKind::neumann, 1.0};
  EXPECT_THROW(fourier_coefficients(std::vector<double>(100, 1.0), b, 32), ResolutionError);
}

TEST(DecayReport, SmoothWindowedDataConverges) {
  const auto chi = standard_chi2();
  auto g = [&](double x) { return chi(x) * (1.0 + x * x * x - std::sin(2.0 * x)); };
  const EigenBasis b{BasisKind::neumann, 1.0};
  const auto samples = sample(1.0, 16385, g);
  const double r128 = decay_report(fourier_coefficients(samples, b, 128), 2);
  const double r256 = decay_report(fourier_coefficients(samples, b, 256), 2);
  EXPECT_LT(std::abs(r256 - r128) / r256, 1e-4);
}

TEST(DecayReport, JumpDataDivergesLinearly) {
  const EigenBasis b{BasisKind::neumann, 1.0};
  const auto samples = sample(1.0, 16385, [](double x) { return x < 0.5 ? 1.0 : 0.0; });
  const double r128 = decay_report(fourier_coefficients(samples, b, 128), 2);
  const double r256 = decay_report(fourier_coefficients(samples, b, 256), 2);
  EXPECT_NEAR(r256 / r128, 2.0, 0.1);
}

TEST(InitialPressure, ZeroFluxGivesZeroField) {
  const auto s = build_initial_pressure(constant_flux(0, 0, 0), 0.1, 16);
  for (double y1 : {0.0, 0.4, 1.0}) {
    for (double y2 : {0.0, 0.05, 0.1}) {
      EXPECT_EQ(eval_p0(s, y1, y2), 0.0);
      const auto g = grad_p0(s, y1, y2);
      EXPECT_EQ(g.d1, 0.0);
      EXPECT_EQ(g.d2, 0.0);
    }
  }
}

TEST(InitialPressure, RequiresEnoughModes) {
  EXPECT_THROW(build_initial_pressure(constant_flux(1, 1, 1), 0.1, 4), InvalidParameter);
}

TEST(InitialPressure, DirichletFaceWithinTailBoundForEveryPreset) {
  std::vector<FluxPreset> presets(3);
  presets[0] = default_preset();
  presets[1].family = "polynomial_in_space";
  presets[1].a1 = 0.1;
  presets[1].a2 = 0.5;
  presets[1].a3 = 0.05;
  presets[1].b = 2.0;
  presets[2].family = "cosine_in_t";
  presets[2].a2 = 1.0;
  presets[2].beta = 0.5;
  presets[2].omega = 1.0;
  for (const auto& p : presets) {
    for (double eps : {0.2, 0.05}) {
      const auto s = build_initial_pressure(make_flux(p, 1.0, 1.0, 0.25), eps, 64);
      double worst = 0.0;
      for (int i = 0; i <= 400; ++i) worst = std::max(worst, std::abs(eval_p0(s, i / 400.0, eps)));
      EXPECT_LE(worst, s.value_tail_bound) << p.family << " eps=" << eps;
    }
  }
}

TEST(InitialPressure, InteriorFivePointResidualIsSmall) {
  const double eps = 0.1, h = 1.0 / 512.0;
  const auto s = build_initial_pressure(testing_support::default_flux(), eps, 64);
  const double x = 0.5, y = eps / 2;
  const double r = (eval_p0(s, x + h, y) + eval_p0(s, x - h, y) + eval_p0(s, x, y + h) + eval_p0(s, x, y - h) -
                    4.0 * eval_p0(s, x, y)) /
                   (h * h);
  EXPECT_LE(std::abs(r), 1e-6);
}

TEST(InitialPressure, HarmonicityResidualConvergesAtSecondOrder) {
  FluxPreset p;
  p.family = "polynomial_in_space";
  p.a1 = 0.3;
  p.a2 = 0.5;
  p.a3 = 0.2;
  p.b = 1.0;
  const double eps = 0.2;
  const auto s = build_initial_pressure(make_flux(p, 1.0, 1.0, 0.25), eps, 64);
  const double x = 0.1, y = 0.11;
  auto residual = [&](double h) {
    return std::abs(eval_p0(s, x + h, y) + eval_p0(s, x - h, y) + eval_p0(s, x, y + h) + eval_p0(s, x, y - h) -
                    4.0 * eval_p0(s, x, y)) /
           (h * h);
  };
  const double r1 = residual(eps / 8), r2 = residual(eps / 16), r3 = residual(eps / 32);
  EXPECT_GE(testing_support::observed_order(r1, r2), 1.9);
  EXPECT_GE(testing_support::observed_order(r2, r3), 1.9);
}

TEST(InitialPressure, NeumannFacesReproduceFluxData) {
  const double eps = 0.1;
  FluxPreset p;
  p.family = "polynomial_in_space";
  p.a1 = 0.3;
  p.a2 = 0.5;
  p.a3 = 0.2;
  p.b = 1.0;
  const auto flux = make_flux(p, 1.0, 1.0, 0.25);
  const auto s = build_initial_pressure(flux, eps, 64);
  const double tol = 1e-3;
  // bottom: inflow eps chi_1 phi_2 = -dp/dy_2
  for (double y1 : {0.3, 0.5, 0.7}) {
    const double h = 1e-5;
    const double d2 = (-3 * eval_p0(s, y1, 0) + 4 * eval_p0(s, y1, h) - eval_p0(s, y1, 2 * h)) / (2 * h);
    EXPECT_NEAR(-d2, eval_phi_eps(flux, eps, Side::bottom, y1, 0.0), tol);
  }
  // walls: inflow = dp/dy_1 on the left, -dp/dy_1 on the right
  for (double xi : {0.3, 0.5, 0.7}) {
    const double y2 = xi * eps, h = 1e-5;
    const double dl = (-3 * eval_p0(s, 0, y2) + 4 * eval_p0(s, h, y2) - eval_p0(s, 2 * h, y2)) / (2 * h);
    const double dr = (3 * eval_p0(s, 1, y2) - 4 * eval_p0(s, 1 - h, y2) + eval_p0(s, 1 - 2 * h, y2)) / (2 * h);
    EXPECT_NEAR(-dl, eval_phi_eps(flux, eps, Side::left, y2, 0.0), 10 * tol);
    EXPECT_NEAR(dr, eval_phi_eps(flux, eps, Side::right, y2, 0.0), 10 * tol);
  }
}

TEST(InitialPressure, WallSlopeVanishesOffWindow) {
  const double eps = 0.1;
  const auto s = build_initial_pressure(testing_support::default_flux(), eps, 64);
  for (double xi : {0.05, 0.1, 0.9}) {
    EXPECT_NEAR(grad_p0(s, 0.0, xi * eps).d1, 0.0, s.gradient_tail_bound + 1e-12);
  }
}

TEST(InitialPressure, LateralInflowGivesNegativeTopSlope) {
  const auto s = build_initial_pressure(constant_flux(1, 0, 1), 0.1, 64);
  EXPECT_LT(grad_p0(s, 0.5, 0.1).d2, 0.0);
  EXPECT_LT(initial_top_slope(s, 0.5), 0.0);
}

TEST(InitialPressure, OutsideRectangleIsADomainError) {
  const auto s = build_initial_pressure(constant_flux(1, 1, 1), 0.1, 16);
  EXPECT_THROW(eval_p0(s, 1.1, 0.05), DomainError);
  EXPECT_THROW(grad_p0(s, 0.5, 0.2), DomainError);
}

TEST(InitialPressure, SmallTruncationRaisesWarning) {
  InitialPressureOptions o;
  o.tail_tolerance = 1e-12;
  const auto s = build_initial_pressure(testing_support::default_flux(), 0.1, 8, o);
  EXPECT_TRUE(s.truncation_warning);
  EXPECT_GT(s.gradient_tail_bound, 0.0);
}

TEST(Kernel, PointwiseFormAndPositivity) {
  const SmoothingKernel K(2.0);
  EXPECT_DOUBLE_EQ(kernel_value(K, 0.0, 1.5), 2.0 / 3.0);
  for (double x : {-10.0, -0.1, 0.0, 0.4, 100.0}) {
    for (double t : {1e-3, 0.5, 4.0}) {
      EXPECT_GT(kernel_value(K, x, t), 0.0);
      EXPECT_NEAR(kernel_value(K, x, t), 4.0 * t / (4.0 * t * t + x * x), 1e-14 * kernel_value(K, x, t));
    }
  }
  EXPECT_THROW(kernel_value(K, 0.0, 0.0), DomainError);
}

TEST(Kernel, DerivativesMatchDifferences) {
  const SmoothingKernel K(1.0);
  const double h = 1e-4;
  for (double x : {-1.0, 0.3, 2.0}) {
    EXPECT_NEAR(kernel_dx(K, x, 0.7), (kernel_value(K, x + h, 0.7) - kernel_value(K, x - h, 0.7)) / (2 * h), 1e-7);
    EXPECT_NEAR(kernel_dxx(K, x, 0.7), (kernel_dx(K, x + h, 0.7) - kernel_dx(K, x - h, 0.7)) / (2 * h), 1e-6);
  }
}

TEST(Kernel, IdentitiesAtUnitTime) {
  const SmoothingKernel K(1.0);
  EXPECT_NEAR(kernel_identity_check(K, 1.0, 0), 2.0 * pi, 1e-6 * 2.0 * pi);
  EXPECT_NEAR(kernel_identity_check(K, 1.0, 1), 0.0, 1e-6);
  EXPECT_THROW(kernel_identity_check(K, 1.0, 2), InvalidParameter);
}

TEST(Kernel, IdentityIsLinearInTime) {
  const SmoothingKernel K(0.7);
  const double a = kernel_identity_check(K, 0.25, 0), b = kernel_identity_check(K, 1.75, 0);
  EXPECT_NEAR((b - a) / 1.5, 2.0 * pi, 1e-6);
}

TEST(Kernel, WeightedBoundsAreFinite) {
  const SmoothingKernel K(1.0);
  for (double d : {0.01, 1.0}) {
    const auto s = kernel_bound_sample(K, 1.0, d, 0.5);
    for (double r : {s.ratio_t, s.ratio_near, s.ratio_far}) {
      EXPECT_TRUE(std::isfinite(r));
      EXPECT_GT(r, 0.0);
    }
  }
}
