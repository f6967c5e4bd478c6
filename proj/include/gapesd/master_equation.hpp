#pragma once

// Pseudomode Lindblad equation for one qubit and two pseudomodes, truncated to at most one
// excitation. The truncation is exact for an initial single excitation: H0 conserves the
// excitation number and the two dissipators only lower it.
//
//   dρ/dt = -i[H0, ρ] - Σ_j Γ_j'/2 (a_j†a_j ρ - 2 a_j ρ a_j† + ρ a_j†a_j)

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "gapesd/dormand_prince.hpp"
#include "gapesd/dynamics.hpp"
#include "gapesd/errors.hpp"

namespace gapesd {

/// Basis order for every 4x4 operator in this header: |g;00>, |e;00>, |g;10>, |g;01>.
enum class Basis : int { ground = 0, qubit = 1, mode1 = 2, mode2 = 3 };

inline constexpr int idx(Basis b) { return static_cast<int>(b); }

using DensityOperator = Eigen::Matrix4cd;

struct JumpOperator {
  Eigen::Matrix4cd op;
  double rate;
};

inline Eigen::Matrix4cd build_hamiltonian(const SystemParams& p) {
  Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
  h(idx(Basis::qubit), idx(Basis::qubit)) = p.omega0;
  h(idx(Basis::mode1), idx(Basis::mode1)) = p.omega_c();
  h(idx(Basis::mode2), idx(Basis::mode2)) = p.omega_c();
  h(idx(Basis::qubit), idx(Basis::mode2)) = h(idx(Basis::mode2), idx(Basis::qubit)) = p.rabi;
  h(idx(Basis::mode1), idx(Basis::mode2)) = h(idx(Basis::mode2), idx(Basis::mode1)) = p.pm.v;
  return h;
}

/// a1 and a2 with their decay rates Γ1' and Γ2'.
inline std::array<JumpOperator, 2> build_jump_operators(const SystemParams& p) {
  Eigen::Matrix4cd a1 = Eigen::Matrix4cd::Zero();
  Eigen::Matrix4cd a2 = Eigen::Matrix4cd::Zero();
  a1(idx(Basis::ground), idx(Basis::mode1)) = 1.0;
  a2(idx(Basis::ground), idx(Basis::mode2)) = 1.0;
  return {JumpOperator{a1, p.pm.gamma1_prime}, JumpOperator{a2, p.pm.gamma2_prime}};
}

inline DensityOperator projector(Basis b) {
  DensityOperator r = DensityOperator::Zero();
  r(idx(b), idx(b)) = 1.0;
  return r;
}

/// Right-hand side of the master equation. The result is made exactly Hermitian so that
/// the integrator never drifts off the Hermitian subspace.
class LindbladRhs {
 public:
  explicit LindbladRhs(const SystemParams& p) : h_(build_hamiltonian(p)) {
    for (const auto& j : build_jump_operators(p)) {
      jumps_.push_back(j.op);
      rates_.push_back(j.rate);
      number_.push_back(j.op.adjoint() * j.op);
    }
  }

  DensityOperator operator()(double, const DensityOperator& rho) const {
    using namespace std::complex_literals;
    DensityOperator d = -1.0i * (h_ * rho - rho * h_);
    for (std::size_t j = 0; j < jumps_.size(); ++j) {
      d -= 0.5 * rates_[j] *
           (number_[j] * rho - 2.0 * jumps_[j] * rho * jumps_[j].adjoint() + rho * number_[j]);
    }
    return 0.5 * (d + d.adjoint());
  }

 private:
  Eigen::Matrix4cd h_;
  std::vector<Eigen::Matrix4cd> jumps_;
  std::vector<double> rates_;
  std::vector<Eigen::Matrix4cd> number_;
};

inline double hermiticity_deviation(const DensityOperator& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline void require_density(const DensityOperator& rho) {
  if (!rho.allFinite()) throw InvalidInput("density operator has non-finite entries");
  if (hermiticity_deviation(rho) > 1e-12) throw InvalidInput("density operator is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > 1e-10) throw InvalidInput("density operator trace differs from 1");
  if (min_eigenvalue(rho) < -1e-9) throw InvalidInput("density operator is not positive semidefinite");
}

struct DensityTrajectory {
  std::vector<double> times;
  std::vector<DensityOperator> states;
};

inline DensityTrajectory propagate_lindblad(const DensityOperator& rho0, const SystemParams& p,
                                            std::span<const double> times, double tol = kDefaultRkTol) {
  require_density(rho0);
  require_valid(p);
  require_time_grid(times);
  detail::require_tol(tol);
  DensityTrajectory out;
  out.times.assign(times.begin(), times.end());
  try {
    out.states = sample_dopri5(LindbladRhs(p), 0.0, rho0, times, detail::rk_options(tol));
  } catch (const StiffnessError& e) {
    throw StiffnessError(std::string(e.what()) + " for " + describe(p));
  }
  return out;
}

}  // namespace gapesd
