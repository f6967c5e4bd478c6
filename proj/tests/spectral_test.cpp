#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "gapesd/spectral.hpp"

using namespace gapesd;

namespace {

const SpectralDensity kFig1 = SpectralDensity::band_gap(1.1, 0.1, 10.0, 1.0);
const SpectralDensity kPerfect = SpectralDensity::band_gap(1.1, 0.1, 11.0, 1.0);
const SpectralDensity kOneLorentzian = SpectralDensity::one_lorentzian(10.0);

// Analytic dD/dΔ; used only as an independent oracle for the maximiser.
double density_slope(const SpectralDensity& sd, double x) {
  const double a2 = 0.25 * sd.gamma1 * sd.gamma1;
  const double b2 = 0.25 * sd.gamma2 * sd.gamma2;
  return -2.0 * x * sd.w1 * sd.gamma1 / std::pow(x * x + a2, 2) + 2.0 * x * sd.w2 * sd.gamma2 / std::pow(x * x + b2, 2);
}

// 1e-4 grid scan for the bracket, then bisection on the analytic slope.
double maximiser_oracle(const SpectralDensity& sd) {
  const double step = 1e-4;
  double best_x = 0.0, best = density_at_detuning(sd, 0.0);
  for (double x = step; x <= 5.0 * sd.gamma1; x += step) {
    const double v = density_at_detuning(sd, x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  if (best_x == 0.0) return 0.0;
  double lo = best_x - step, hi = best_x + step;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (density_slope(sd, mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Validate, CaptionParameterSetsPass) {
  EXPECT_TRUE(validate(kFig1).ok());
  EXPECT_TRUE(validate(kOneLorentzian).ok());
  EXPECT_TRUE(validate(kPerfect).ok());
  EXPECT_TRUE(validate(SpectralDensity::band_gap(1.1, 0.1, 0.11, 0.01)).ok());
  EXPECT_TRUE(validate(SpectralDensity::band_gap(1.1, 0.1, 1.1, 0.1)).ok());
}

TEST(Validate, WeightSumViolation) {
  auto r = validate(SpectralDensity::band_gap(1.5, 0.1, 10.0, 1.0));
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(r.has(Violation::weight_sum));
  EXPECT_NE(r.describe().find("weight sum"), std::string::npos);
}

TEST(Validate, WidthOrderingAndPositivity) {
  auto r = validate(SpectralDensity::band_gap(1.1, 0.1, 1.0, 2.0));
  EXPECT_TRUE(r.has(Violation::width_ordering));
  // w2/w1 = 0.0909 > gamma2/gamma1 = 0.05
  auto q = validate(SpectralDensity::band_gap(1.1, 0.1, 20.0, 1.0));
  EXPECT_TRUE(q.has(Violation::positivity));
  EXPECT_FALSE(q.has(Violation::width_ordering));
  EXPECT_TRUE(validate(SpectralDensity{1.1, 0.1, 20.0, 0.0, 0.0}).has(Violation::positivity));
  EXPECT_TRUE(validate(SpectralDensity{0.9, -0.1, 20.0, 2.0, 0.0}).has(Violation::negative_weight));
}

TEST(Validate, NonFiniteIsItsOwnClass) {
  auto r = validate(SpectralDensity{std::numeric_limits<double>::quiet_NaN(), 0.1, 20.0, 2.0, 0.0});
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0], Violation::non_finite);
  EXPECT_TRUE(validate(SpectralDensity{1.1, 0.1, INFINITY, 2.0, 0.0}).has(Violation::non_finite));
}

TEST(Validate, PositivityMatchesGridScan) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const double w2 = 0.5 * u(rng);
    const double g1 = 0.1 + 20.0 * u(rng);
    const double g2 = g1 * u(rng);
    SpectralDensity sd{1.0 + w2, w2, g1, g2, 0.0};
    double min_d = INFINITY;
    for (int i = 0; i <= 10000; ++i) min_d = std::min(min_d, density_at_detuning(sd, -10.0 * g1 + 20.0 * g1 * i / 10000));
    const bool grid_positive = min_d >= -1e-12 * 4.0 * sd.w1 / g1;
    EXPECT_EQ(!validate(sd).has(Violation::positivity), grid_positive) << "w2=" << w2 << " g1=" << g1 << " g2=" << g2;
  }
}

TEST(Density, ExampleValues) {
  EXPECT_NEAR(evaluate_density(kFig1, kFig1.omega_c), 0.02, 1e-15);
  EXPECT_NEAR(evaluate_density(kPerfect, kPerfect.omega_c), 0.0, 1e-15);
  EXPECT_NEAR(evaluate_density(kOneLorentzian, 0.0), 0.2, 1e-15);
}

TEST(Density, NonNegativeOnWideGridForValidModels) {
  for (const auto& sd : {kFig1, kPerfect, kOneLorentzian, SpectralDensity::band_gap(1.1, 0.1, 10.0, 9.0),
                         SpectralDensity::band_gap(1.1, 0.1, 0.11, 0.01)}) {
    for (int i = 0; i < 10000; ++i) {
      const double w = sd.omega_c - 10.0 * sd.gamma1 + 20.0 * sd.gamma1 * i / 9999.0;
      ASSERT_GE(evaluate_density(sd, w), -1e-15) << w;
    }
  }
}

TEST(Density, EvenInDetuning) {
  SpectralDensity sd = kFig1;
  sd.omega_c = 3.7;
  for (double x : {0.1, 1.0, 3.07, 12.5, 300.0}) EXPECT_EQ(evaluate_density(sd, sd.omega_c + x), evaluate_density(sd, sd.omega_c - x));
}

TEST(PerfectGap, Detection) {
  EXPECT_TRUE(is_perfect_gap(kPerfect));
  EXPECT_FALSE(is_perfect_gap(kFig1));
  EXPECT_TRUE(is_perfect_gap(SpectralDensity::band_gap(1.1, 0.1, 0.11, 0.01)));
  EXPECT_FALSE(is_perfect_gap(kOneLorentzian));
  EXPECT_THROW(is_perfect_gap(SpectralDensity{1.1, 0.1, 20.0, 0.0, 0.0}), InvalidInput);
}

TEST(PerfectGap, ImpliesZeroCentreDensityAndGammaPrime) {
  for (double g2h : {0.01, 0.1, 1.0, 3.0}) {
    auto sd = SpectralDensity::band_gap(1.1, 0.1, 11.0 * g2h, g2h);
    ASSERT_TRUE(is_perfect_gap(sd));
    EXPECT_LE(std::abs(evaluate_density(sd, sd.omega_c)), 1e-12);
    EXPECT_LE(derive_pseudomode_params(sd).gamma1_prime, 1e-12);
  }
}

TEST(Pseudomode, DerivedParameters) {
  auto pm = derive_pseudomode_params(kFig1);
  EXPECT_NEAR(pm.gamma1_prime, 0.2, 1e-14);
  EXPECT_NEAR(pm.gamma2_prime, 21.8, 1e-13);
  EXPECT_NEAR(pm.v, std::sqrt(0.11) * 9.0, 1e-14);
  EXPECT_NEAR(pm.v, 2.98496, 1e-5);

  auto pg = derive_pseudomode_params(kPerfect);
  EXPECT_EQ(pg.gamma1_prime, 0.0);
  EXPECT_NEAR(pg.gamma2_prime, 24.0, 1e-13);
  EXPECT_NEAR(pg.v, 3.31662, 1e-5);

  auto ol = derive_pseudomode_params(kOneLorentzian);
  EXPECT_EQ(ol.gamma1_prime, 0.0);
  EXPECT_EQ(ol.gamma2_prime, 20.0);
  EXPECT_EQ(ol.v, 0.0);
}

TEST(Pseudomode, PolesAndDensityRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double g1 = 0.05 + 30.0 * u(rng);
    const double g2 = g1 * (0.02 + 0.95 * u(rng));
    const double w2 = std::min(0.5 * u(rng), (g2 / g1) / (1.0 - g2 / g1));  // keeps w2/w1 <= g2/g1
    SpectralDensity sd{1.0 + w2, w2, g1, g2, 2.0 * u(rng) - 1.0};
    ASSERT_TRUE(validate(sd).ok());
    const auto pm = derive_pseudomode_params(sd);
    auto [wide, narrow] = pseudomode_poles(pm, sd.omega_c);
    EXPECT_NEAR(wide.real(), sd.omega_c, 1e-9 * g1);
    EXPECT_NEAR(wide.imag(), -0.5 * g1, 1e-9 * g1);
    EXPECT_NEAR(narrow.imag(), -0.5 * g2, 1e-7 * g1);
    for (double x : {-3.0 * g1, -0.7 * g2, 0.0, 0.3 * g2, g1, 10.0 * g1}) {
      const double w = sd.omega_c + x;
      EXPECT_NEAR(pseudomode_density(pm, sd.omega_c, w), evaluate_density(sd, w), 1e-10 * 4.0 * sd.w1 / g2);
    }
  }
}

TEST(CriticalDetuning, ClosedForm) {
  EXPECT_NEAR(critical_detuning_paper(kFig1), 3.53, 0.005);
  EXPECT_NEAR(critical_detuning_paper(kFig1), 3.5329420494377269, 1e-12);
  EXPECT_NEAR(critical_detuning_paper(kPerfect), 3.7837315959718126, 1e-12);
  EXPECT_THROW(critical_detuning_paper(kOneLorentzian), DomainError);
  EXPECT_THROW(critical_detuning_paper(SpectralDensity::band_gap(1.5, 0.1, 10, 1)), InvalidInput);
}

TEST(CriticalDetuning, ClosedFormNegativeRadicand) {
  // small W2 and Γ2 close to Γ1: Γ1²√(W2Γ2) < Γ2²√(W1Γ1)
  SpectralDensity sd = SpectralDensity::band_gap(1.01, 0.01, 10.0, 9.5);
  ASSERT_TRUE(validate(sd).ok());
  EXPECT_THROW(critical_detuning_paper(sd), DomainError);
}

TEST(CriticalDetuning, NumericMatchesIndependentOracle) {
  const double fig1 = critical_detuning_numeric(kFig1);
  EXPECT_NEAR(fig1, maximiser_oracle(kFig1), 1e-6);
  EXPECT_NEAR(fig1, 3.0715037701402517, 1e-6);  // stationary point of D, high-precision
  const double pg = critical_detuning_numeric(kPerfect);
  EXPECT_NEAR(pg, maximiser_oracle(kPerfect), 1e-6);
  EXPECT_NEAR(pg, std::sqrt(11.0), 1e-6);
  EXPECT_EQ(critical_detuning_numeric(kOneLorentzian), 0.0);
}

TEST(CriticalDetuning, NumericIsGridMaximum) {
  for (const auto& sd : {kFig1, kPerfect, SpectralDensity::band_gap(1.1, 0.1, 10.0, 4.0)}) {
    const double x = critical_detuning_numeric(sd);
    const double dx = density_at_detuning(sd, x);
    for (int i = 0; i <= 100000; ++i) {
      const double d = 5.0 * sd.gamma1 * i / 100000.0;
      ASSERT_GE(dx, density_at_detuning(sd, d) - 1e-15) << d;
    }
  }
}
