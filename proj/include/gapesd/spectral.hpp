#pragma once

// Band-gap reservoir spectral density: a Lorentzian of weight W1 and width Γ1 minus a
// narrower one of weight W2 and width Γ2, both centred at ω_c. Every rate and frequency
// is expressed in units of the qubit-pseudomode coupling Ω0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gapesd/errors.hpp"
#include "gapesd/golden_section.hpp"

namespace gapesd {

struct SpectralDensity {
  double w1 = 1.0;
  double w2 = 0.0;
  double gamma1 = 20.0;  ///< full width at half maximum of the positive Lorentzian
  double gamma2 = 0.0;   ///< full width at half maximum of the negative Lorentzian
  double omega_c = 0.0;

  /// Gap model from the half-widths Γ1/2 and Γ2/2.
  static SpectralDensity band_gap(double w1, double w2, double gamma1_half, double gamma2_half,
                                  double omega_c = 0.0) {
    return {w1, w2, 2.0 * gamma1_half, 2.0 * gamma2_half, omega_c};
  }

  /// Single Lorentzian, encoded as w2 = gamma2 = 0.
  static SpectralDensity one_lorentzian(double gamma1_half, double omega_c = 0.0) {
    return {1.0, 0.0, 2.0 * gamma1_half, 0.0, omega_c};
  }

  bool is_one_lorentzian() const { return w2 == 0.0; }

  friend bool operator==(const SpectralDensity&, const SpectralDensity&) = default;
};

struct PseudomodeParams {
  double gamma1_prime = 0.0;  ///< decay rate of the first pseudomode
  double gamma2_prime = 0.0;  ///< decay rate of the second pseudomode
  double v = 0.0;             ///< pseudomode-pseudomode coupling
};

enum class Violation {
  non_finite,
  weight_sum,      ///< w1 - w2 != 1
  negative_weight, ///< w2 < 0
  width_ordering,  ///< not 0 <= gamma2 < gamma1
  positivity,      ///< w2/w1 > gamma2/gamma1, so D(ω) dips below zero
};

inline const char* to_string(Violation v) {
  switch (v) {
    case Violation::non_finite: return "non-finite parameter";
    case Violation::weight_sum: return "weight sum: w1 - w2 must equal 1";
    case Violation::negative_weight: return "weights must be non-negative";
    case Violation::width_ordering: return "width ordering: require 0 <= gamma2 < gamma1";
    case Violation::positivity: return "positivity: require w2/w1 <= gamma2/gamma1";
  }
  return "unknown";
}

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(Violation v) const {
    return std::find(violations.begin(), violations.end(), v) != violations.end();
  }
  std::string describe() const {
    std::string out;
    for (auto v : violations) {
      if (!out.empty()) out += "; ";
      out += to_string(v);
    }
    return out;
  }
};

inline constexpr double kWeightSumTol = 1e-12;
inline constexpr double kPerfectGapTol = 1e-12;

inline ValidationResult validate(const SpectralDensity& sd) {
  ValidationResult r;
  for (double x : {sd.w1, sd.w2, sd.gamma1, sd.gamma2, sd.omega_c}) {
    if (!std::isfinite(x)) {
      r.violations.push_back(Violation::non_finite);
      return r;
    }
  }
  if (std::abs(sd.w1 - sd.w2 - 1.0) > kWeightSumTol) r.violations.push_back(Violation::weight_sum);
  if (sd.w2 < 0.0 || sd.w1 < 0.0) r.violations.push_back(Violation::negative_weight);
  if (!(sd.gamma2 >= 0.0 && sd.gamma2 < sd.gamma1)) r.violations.push_back(Violation::width_ordering);
  // w2 * gamma1 <= w1 * gamma2, with a relative allowance so that the perfect gap
  // (equality) survives rounding of user inputs.
  if (sd.w2 > 0.0) {
    const double lhs = sd.w2 * sd.gamma1;
    const double rhs = sd.w1 * sd.gamma2;
    if (lhs > rhs + kPerfectGapTol * std::max(std::abs(lhs), std::abs(rhs)))
      r.violations.push_back(Violation::positivity);
  }
  return r;
}

inline void require_valid(const SpectralDensity& sd) {
  auto r = validate(sd);
  if (!r.ok()) {
    std::ostringstream os;
    os << "invalid spectral density (w1=" << sd.w1 << ", w2=" << sd.w2 << ", gamma1=" << sd.gamma1
       << ", gamma2=" << sd.gamma2 << "): " << r.describe();
    throw InvalidInput(os.str());
  }
}

/// D(ω), the two-Lorentzian difference evaluated exactly as written.
inline double evaluate_density(const SpectralDensity& sd, double omega) {
  const double x2 = (omega - sd.omega_c) * (omega - sd.omega_c);
  const double h1 = 0.5 * sd.gamma1;
  double d = sd.w1 * sd.gamma1 / (x2 + h1 * h1);
  if (sd.w2 != 0.0) {
    const double h2 = 0.5 * sd.gamma2;
    d -= sd.w2 * sd.gamma2 / (x2 + h2 * h2);
  }
  return d;
}

/// D seen by a qubit detuned by Δ = ω_c - ω0 from the centre.
inline double density_at_detuning(const SpectralDensity& sd, double delta) {
  return evaluate_density(sd, sd.omega_c - delta);
}

/// True when W1/Γ1 = W2/Γ2 (relative tolerance), i.e. D(ω_c) = 0.
inline bool is_perfect_gap(const SpectralDensity& sd, double tol = kPerfectGapTol) {
  if (sd.w2 == 0.0) return false;
  if (sd.gamma2 == 0.0 || sd.gamma1 == 0.0)
    throw InvalidInput("is_perfect_gap: zero width with non-zero weight");
  const double r1 = sd.w1 / sd.gamma1;
  const double r2 = sd.w2 / sd.gamma2;
  return std::abs(r1 - r2) <= tol * std::max(std::abs(r1), std::abs(r2));
}

inline PseudomodeParams derive_pseudomode_params(const SpectralDensity& sd) {
  PseudomodeParams pm;
  pm.gamma1_prime = sd.w1 * sd.gamma2 - sd.w2 * sd.gamma1;
  pm.gamma2_prime = sd.w1 * sd.gamma1 - sd.w2 * sd.gamma2;
  pm.v = std::sqrt(sd.w1 * sd.w2) * (sd.gamma1 - sd.gamma2) / 2.0;
  // The perfect gap is the Γ'1 = 0 boundary; do not let rounding push it negative.
  if (sd.w2 > 0.0 && is_perfect_gap(sd)) pm.gamma1_prime = 0.0;
  pm.gamma1_prime = std::max(pm.gamma1_prime, 0.0);
  return pm;
}

/// Complex poles of the coupled pseudomode pair, i.e. eigenvalues of
/// [[z1', V], [V, z2']] with z_j' = ω_c - iΓ_j'/2. For a valid density these are
/// ω_c - iΓ1/2 and ω_c - iΓ2/2, ordered by decreasing width.
inline std::pair<std::complex<double>, std::complex<double>> pseudomode_poles(const PseudomodeParams& pm,
                                                                              double omega_c) {
  using namespace std::complex_literals;
  const std::complex<double> z1 = omega_c - 0.5i * pm.gamma1_prime;
  const std::complex<double> z2 = omega_c - 0.5i * pm.gamma2_prime;
  const std::complex<double> mean = 0.5 * (z1 + z2);
  const std::complex<double> disc = std::sqrt(0.25 * (z1 - z2) * (z1 - z2) + pm.v * pm.v);
  auto a = mean + disc;
  auto b = mean - disc;
  if (a.imag() > b.imag()) std::swap(a, b);
  return {a, b};
}

/// D(ω) rebuilt from the pseudomode side: -2 Im[(ω - H_eff)^{-1}]_{22}, where H_eff is the
/// non-Hermitian 2x2 pseudomode Hamiltonian. Agrees with evaluate_density for valid input.
inline double pseudomode_density(const PseudomodeParams& pm, double omega_c, double omega) {
  using namespace std::complex_literals;
  const std::complex<double> a = omega - (omega_c - 0.5i * pm.gamma1_prime);
  const std::complex<double> d = omega - (omega_c - 0.5i * pm.gamma2_prime);
  const std::complex<double> g22 = a / (a * d - pm.v * pm.v);
  return -2.0 * g22.imag();
}

/// Closed-form critical detuning of the gap model (not the exact maximiser of D).
/// Throws DomainError when w2 = 0 or the radicand is negative.
inline double critical_detuning_paper(const SpectralDensity& sd) {
  require_valid(sd);
  if (sd.w2 <= 0.0 || sd.gamma2 <= 0.0)
    throw DomainError("critical detuning formula needs two Lorentzians (w2 > 0, gamma2 > 0)");
  const double g1 = sd.gamma1;
  const double g2 = sd.gamma2;
  const double num = g1 * g1 * std::sqrt(sd.w2 * g2) - g2 * g2 * std::sqrt(sd.w1 * g1);
  const double den = 4.0 * std::sqrt(sd.w1) * (std::sqrt(g1) - std::sqrt(g2));
  const double sq = num / den;
  if (!(sq >= 0.0)) {
    std::ostringstream os;
    os << "critical detuning: negative radicand " << sq << " (no critical detuning for these widths)";
    throw DomainError(os.str());
  }
  return std::sqrt(sq);
}

/// Δ* > 0 maximising D(ω_c - Δ), located by a grid scan of [0, 5Γ1] and golden-section
/// refinement. Returns 0 when the maximum sits at the centre.
inline double critical_detuning_numeric(const SpectralDensity& sd, int scan_points = 20001,
                                        double tol = 1e-9) {
  require_valid(sd);
  const double hi = 5.0 * sd.gamma1;
  const double step = hi / (scan_points - 1);
  auto d = [&](double delta) { return density_at_detuning(sd, delta); };
  int best = 0;
  double best_val = d(0.0);
  for (int i = 1; i < scan_points; ++i) {
    const double v = d(i * step);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == 0) return 0.0;
  const double lo = (best - 1) * step;
  const double up = std::min(hi, (best + 1) * step);
  return golden_section_maximize(d, lo, up, tol).x;
}

}  // namespace gapesd
