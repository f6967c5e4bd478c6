#pragma once

// Single-excitation amplitudes (c1, b1, b2) of one qubit coupled to two pseudomodes:
//   i dx/dt = M x,   M = [[ω0, 0, Ω0], [0, z1', V], [Ω0, V, z2']],   z_j' = ω_c - iΓ_j'/2,
// with x(0) = (1, 0, 0). Solved exactly by eigendecomposition and, as an independent
// route, by adaptive Runge-Kutta.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gapesd/dormand_prince.hpp"
#include "gapesd/eigen3x3.hpp"
#include "gapesd/errors.hpp"
#include "gapesd/spectral.hpp"

namespace gapesd {

struct SystemParams {
  double delta = 0.0;  ///< Δ = ω_c - ω0
  double rabi = 1.0;   ///< qubit / second-pseudomode coupling Ω0
  PseudomodeParams pm;
  double omega0 = 0.0;  ///< frame offset; only phases depend on it

  double omega_c() const { return omega0 + delta; }

  static SystemParams from(const SpectralDensity& sd, double delta, double rabi = 1.0, double omega0 = 0.0) {
    require_valid(sd);
    return {delta, rabi, derive_pseudomode_params(sd), omega0};
  }
};

inline std::string describe(const SystemParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "delta=" << p.delta << " rabi=" << p.rabi << " gamma1_prime=" << p.pm.gamma1_prime
     << " gamma2_prime=" << p.pm.gamma2_prime << " v=" << p.pm.v << " omega0=" << p.omega0;
  return os.str();
}

inline void require_valid(const SystemParams& p) {
  const bool finite = std::isfinite(p.delta) && std::isfinite(p.rabi) && std::isfinite(p.omega0) &&
                      std::isfinite(p.pm.gamma1_prime) && std::isfinite(p.pm.gamma2_prime) &&
                      std::isfinite(p.pm.v);
  if (!finite || p.rabi < 0.0 || p.pm.gamma1_prime < 0.0 || !(p.pm.gamma2_prime > 0.0) || p.pm.v < 0.0)
    throw InvalidInput("invalid system parameters: " + describe(p));
}

struct AmplitudeState {
  cplx c1{1.0};
  cplx b1{0.0};
  cplx b2{0.0};

  Eigen::Vector3cd vec() const { return {c1, b1, b2}; }
  static AmplitudeState from(const Eigen::Vector3cd& x) { return {x(0), x(1), x(2)}; }
};

inline double excitation_norm(const AmplitudeState& s) {
  return std::norm(s.c1) + std::norm(s.b1) + std::norm(s.b2);
}

enum class Method { eigen, runge_kutta };

struct Trajectory {
  std::vector<double> times;
  std::vector<AmplitudeState> states;
  Method method = Method::eigen;
  bool rk_fallback = false;  ///< eigen route requested but spectrum too degenerate

  std::size_t size() const { return times.size(); }
};

inline constexpr int kDefaultGridPoints = 2001;
inline constexpr double kDefaultTMax = 50.0;
inline constexpr double kDefaultRkTol = 1e-10;
inline constexpr double kDegeneracyThreshold = 1e-8;

/// `n` equally spaced points on [0, t_max]; the last is exactly t_max.
inline std::vector<double> uniform_grid(double t_max, int n) {
  if (n < 2 || !(t_max > 0.0)) throw InvalidInput("uniform_grid: need n >= 2 and t_max > 0");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[i] = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
  g.back() = t_max;
  return g;
}

inline void require_time_grid(std::span<const double> times) {
  if (times.empty()) throw InvalidInput("time grid is empty");
  if (!std::isfinite(times[0]) || times[0] < 0.0) throw InvalidInput("time grid must start at t >= 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]) || !std::isfinite(times[i]))
      throw InvalidInput("time grid must be strictly increasing");
}

inline Eigen::Matrix3cd build_generator(const SystemParams& p) {
  using namespace std::complex_literals;
  const cplx z1 = p.omega_c() - 0.5i * p.pm.gamma1_prime;
  const cplx z2 = p.omega_c() - 0.5i * p.pm.gamma2_prime;
  Eigen::Matrix3cd m;
  m << p.omega0, 0.0, p.rabi,
       0.0, z1, p.pm.v,
       p.rabi, p.pm.v, z2;
  return m;
}

/// Closed-form solution x(t) = Σ_j α_j e^{-iλ_j t} v_j, valid for any real t.
class ExactAmplitudes {
 public:
  explicit ExactAmplitudes(const SystemParams& p, const AmplitudeState& initial = {})
      : generator_(build_generator(p)), eig_(eigen_decompose(generator_)) {
    gap_ = relative_eigen_gap(eig_.values);
    if (well_conditioned()) coeffs_ = eig_.vectors.fullPivLu().solve(initial.vec());
    else coeffs_.setZero();
  }

  bool well_conditioned() const { return gap_ > kDegeneracyThreshold; }
  double relative_gap() const { return gap_; }
  const Eigensystem3& eigensystem() const { return eig_; }
  const Eigen::Matrix3cd& generator() const { return generator_; }

  AmplitudeState operator()(double t) const {
    using namespace std::complex_literals;
    Eigen::Vector3cd x = Eigen::Vector3cd::Zero();
    for (int j = 0; j < 3; ++j) x += coeffs_(j) * std::exp(-1.0i * eig_.values[j] * t) * eig_.vectors.col(j);
    return AmplitudeState::from(x);
  }

 private:
  Eigen::Matrix3cd generator_;
  Eigensystem3 eig_;
  Eigen::Vector3cd coeffs_;
  double gap_ = 0.0;
};

namespace detail {

inline void require_tol(double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-3)) throw InvalidInput("integrator tolerance must lie in [1e-13, 1e-3]");
}

inline auto amplitude_rhs(const SystemParams& p) {
  using namespace std::complex_literals;
  const Eigen::Matrix3cd minus_i_m = -1.0i * build_generator(p);
  return [minus_i_m](double, const Eigen::Vector3cd& x) -> Eigen::Vector3cd { return minus_i_m * x; };
}

inline IntegratorOptions rk_options(double tol) {
  IntegratorOptions opt;
  opt.rtol = tol;
  opt.atol = tol;
  return opt;
}

}  // namespace detail

/// Adaptive Dormand-Prince integration of the amplitude equations, densely sampled on `times`.
inline Trajectory propagate_rk(const SystemParams& p, std::span<const double> times, double tol = kDefaultRkTol) {
  require_valid(p);
  require_time_grid(times);
  detail::require_tol(tol);
  Trajectory tr;
  tr.method = Method::runge_kutta;
  tr.times.assign(times.begin(), times.end());
  std::vector<Eigen::Vector3cd> xs;
  try {
    xs = sample_dopri5(detail::amplitude_rhs(p), 0.0, AmplitudeState{}.vec(), times, detail::rk_options(tol));
  } catch (const StiffnessError& e) {
    throw StiffnessError(std::string(e.what()) + " for " + describe(p));
  }
  tr.states.reserve(xs.size());
  for (const auto& x : xs) tr.states.push_back(AmplitudeState::from(x));
  return tr;
}

inline Trajectory propagate_rk(const SystemParams& p, double t_end, double tol = kDefaultRkTol,
                               int grid_points = kDefaultGridPoints) {
  if (!(t_end > 0.0)) throw InvalidInput("propagate_rk: t_end must be positive");
  const auto g = uniform_grid(t_end, grid_points);
  return propagate_rk(p, g, tol);
}

/// Exact propagation by eigendecomposition; falls back to propagate_rk (and flags it)
/// when two eigenvalues of the generator nearly coincide.
inline Trajectory propagate_eigen(const SystemParams& p, std::span<const double> times,
                                  double fallback_tol = kDefaultRkTol) {
  require_valid(p);
  require_time_grid(times);
  ExactAmplitudes exact(p);
  if (!exact.well_conditioned()) {
    Trajectory tr = propagate_rk(p, times, fallback_tol);
    tr.rk_fallback = true;
    return tr;
  }
  Trajectory tr;
  tr.method = Method::eigen;
  tr.times.assign(times.begin(), times.end());
  tr.states.reserve(times.size());
  for (double t : times) tr.states.push_back(exact(t));
  return tr;
}

/// Continuous-time solution on [0, t_max]: the exact form when available, otherwise a
/// dense Runge-Kutta interpolant. Used where the onset search needs arbitrary t.
class AmplitudeSolution {
 public:
  AmplitudeSolution(const SystemParams& p, double t_max, double rk_tol = kDefaultRkTol)
      : impl_(make(p, t_max, rk_tol)) {}

  AmplitudeState operator()(double t) const {
    if (const auto* e = std::get_if<ExactAmplitudes>(&impl_)) return (*e)(t);
    return AmplitudeState::from(std::get<DenseSolution<Eigen::Vector3cd>>(impl_)(t));
  }

  bool rk_fallback() const { return std::holds_alternative<DenseSolution<Eigen::Vector3cd>>(impl_); }

 private:
  using Impl = std::variant<ExactAmplitudes, DenseSolution<Eigen::Vector3cd>>;

  static Impl make(const SystemParams& p, double t_max, double rk_tol) {
    require_valid(p);
    ExactAmplitudes exact(p);
    if (exact.well_conditioned()) return exact;
    detail::require_tol(rk_tol);
    try {
      return solve_dopri5(detail::amplitude_rhs(p), 0.0, AmplitudeState{}.vec(), t_max, detail::rk_options(rk_tol));
    } catch (const StiffnessError& e) {
      throw StiffnessError(std::string(e.what()) + " for " + describe(p));
    }
  }

  Impl impl_;
};

}  // namespace gapesd
