#pragma once

// Two-qubit entanglement for the initial state α|00> + β|11>, each qubit decaying into its
// own structured reservoir. Everything follows from the single-qubit amplitude c1(t).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "gapesd/dynamics.hpp"
#include "gapesd/errors.hpp"
#include "gapesd/golden_section.hpp"

namespace gapesd {

struct QubitPairInit {
  double alpha = 0.5;
  double beta = 0.8660254037844386;  // √3/2

  static QubitPairInit make(double alpha, double beta) {
    QubitPairInit q{alpha, beta};
    q.check();
    return q;
  }
  /// β fixed by normalisation.
  static QubitPairInit from_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in [0, 1]");
    return make(alpha, std::sqrt(std::max(0.0, 1.0 - alpha * alpha)));
  }

  void check() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha < 0.0 || beta < 0.0)
      throw InvalidInput("alpha and beta must be finite and non-negative");
    if (std::abs(alpha * alpha + beta * beta - 1.0) > 1e-12)
      throw InvalidInput("alpha^2 + beta^2 must equal 1");
  }

  /// |c1|^2 at or below which the concurrence vanishes (non-positive when α >= β).
  double esd_threshold() const { return 1.0 - alpha / beta; }
};

/// ρ_AB in the basis |00>, |01>, |10>, |11>.
using TwoQubitDensity = Eigen::Matrix4cd;

inline constexpr double kAmplitudeExcessTol = 1e-9;

inline TwoQubitDensity build_rho_ab(cplx c1, const QubitPairInit& init) {
  const double mag = std::abs(c1);
  if (!(mag <= 1.0 + kAmplitudeExcessTol)) throw DomainError("build_rho_ab: |c1| exceeds 1");
  if (mag > 1.0) c1 /= mag;
  const double p = std::min(std::norm(c1), 1.0);
  const double a = init.alpha;
  const double b = init.beta;
  TwoQubitDensity rho = TwoQubitDensity::Zero();
  rho(0, 0) = a * a + b * b * (1.0 - p) * (1.0 - p);
  rho(1, 1) = b * b * p * (1.0 - p);
  rho(2, 2) = b * b * p * (1.0 - p);
  rho(3, 3) = b * b * p * p;
  rho(0, 3) = a * b * c1 * c1;
  rho(3, 0) = std::conj(rho(0, 3));
  return rho;
}

inline double concurrence_closed_form(double abs2_c1, const QubitPairInit& init) {
  const double p = abs2_c1;
  const double a = init.alpha;
  const double b = init.beta;
  return 2.0 * std::max(0.0, a * b * p - b * b * p * (1.0 - p));
}

inline bool is_x_form(const TwoQubitDensity& rho, double tol = 1e-14) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j && i + j != 3 && std::abs(rho(i, j)) > tol) return false;
  return true;
}

/// Wootters concurrence of an X-shaped state:
///   C = 2 max{0, |ρ_03| - √(ρ_11 ρ_22), |ρ_12| - √(ρ_00 ρ_33)}.
/// The second branch is zero for the single-coherence states built above.
inline double concurrence_wootters(const TwoQubitDensity& rho) {
  if (!is_x_form(rho)) throw UnsupportedShape("concurrence_wootters: density matrix is not X-shaped");
  const double r00 = rho(0, 0).real(), r11 = rho(1, 1).real(), r22 = rho(2, 2).real(), r33 = rho(3, 3).real();
  const double c1 = std::abs(rho(0, 3)) - std::sqrt(std::max(0.0, r11 * r22));
  const double c2 = std::abs(rho(1, 2)) - std::sqrt(std::max(0.0, r00 * r33));
  return 2.0 * std::max({0.0, c1, c2});
}

inline std::vector<double> concurrence_series(const Trajectory& traj, const QubitPairInit& init) {
  std::vector<double> c;
  c.reserve(traj.size());
  for (const auto& s : traj.states) c.push_back(concurrence_closed_form(std::norm(s.c1), init));
  return c;
}

struct Interval {
  double start;
  double end;
};

struct EsdReport {
  std::optional<double> onset;
  std::vector<Interval> revivals;
  std::optional<double> trapped_value;
};

inline constexpr double kOnsetTimeTol = 1e-10;
inline constexpr double kRevivalThreshold = 1e-12;
inline constexpr double kTrapWindow = 0.2;
inline constexpr double kTrapRelVariation = 1e-4;
inline constexpr double kTrapMinValue = 1e-6;

namespace detail {

/// First t in (0, t_max] at which |c1(t)|^2 falls to `threshold`, scanning `scan_points`
/// uniform samples and bisecting the first bracketing interval.
inline std::optional<double> first_crossing(const AmplitudeSolution& sol, double threshold, double t_max,
                                            int scan_points) {
  auto g = [&](double t) { return std::norm(sol(t).c1) - threshold; };
  const auto grid = uniform_grid(t_max, scan_points);
  double prev_t = grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double t = grid[i];
    if (g(t) <= 0.0) return bisect_root(g, prev_t, t, kOnsetTimeTol);
    prev_t = t;
  }
  return std::nullopt;
}

}  // namespace detail

inline std::optional<double> find_esd_onset(const SystemParams& p, const QubitPairInit& init, double t_max,
                                            int scan_points = kDefaultGridPoints) {
  init.check();
  if (init.alpha >= init.beta) return std::nullopt;
  if (!(t_max > 0.0)) throw InvalidInput("find_esd_onset: t_max must be positive");
  AmplitudeSolution sol(p, t_max);
  return detail::first_crossing(sol, init.esd_threshold(), t_max, scan_points);
}

/// Onset, revival intervals and trapped plateau of the concurrence on [0, t_max].
/// Revival boundaries are refined by bisection on C(t) - 1e-12.
inline EsdReport analyze(const SystemParams& p, const QubitPairInit& init, double t_max,
                         int grid_points = kDefaultGridPoints) {
  init.check();
  EsdReport rep;
  AmplitudeSolution sol(p, t_max);
  const auto grid = uniform_grid(t_max, grid_points);
  std::vector<double> conc;
  conc.reserve(grid.size());
  for (double t : grid) conc.push_back(concurrence_closed_form(std::norm(sol(t).c1), init));

  if (init.alpha < init.beta) rep.onset = detail::first_crossing(sol, init.esd_threshold(), t_max, grid_points);

  if (rep.onset) {
    auto above = [&](double t) { return concurrence_closed_form(std::norm(sol(t).c1), init) - kRevivalThreshold; };
    std::size_t i = 0;
    while (i < grid.size() && grid[i] <= *rep.onset) ++i;
    while (i < grid.size()) {
      if (conc[i] <= kRevivalThreshold) {
        ++i;
        continue;
      }
      const double start = i > 0 && grid[i - 1] > *rep.onset ? bisect_root(above, grid[i - 1], grid[i], kOnsetTimeTol)
                                                             : grid[i];
      std::size_t j = i;
      while (j + 1 < grid.size() && conc[j + 1] > kRevivalThreshold) ++j;
      const double end = j + 1 < grid.size() ? bisect_root(above, grid[j], grid[j + 1], kOnsetTimeTol) : grid[j];
      rep.revivals.push_back({std::max(start, *rep.onset), end});
      i = j + 1;
    }
  }

  const double window_start = (1.0 - kTrapWindow) * t_max;
  double sum = 0.0, lo = INFINITY, hi = -INFINITY;
  int n = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < window_start) continue;
    sum += conc[i];
    lo = std::min(lo, conc[i]);
    hi = std::max(hi, conc[i]);
    ++n;
  }
  if (n > 0) {
    const double mean = sum / n;
    if (mean > kTrapMinValue && (hi - lo) / mean < kTrapRelVariation) rep.trapped_value = mean;
  }
  return rep;
}

}  // namespace gapesd
