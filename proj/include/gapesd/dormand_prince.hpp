#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta integrator with the standard fourth-order
// continuous extension. The state is any fixed-size Eigen dense type (real or complex).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include "gapesd/errors.hpp"

namespace gapesd {

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double min_step = 1e-14;
  long max_steps = 20'000'000;
};

/// One accepted step together with the coefficients of its interpolating polynomial.
template <class State>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  State r1, r2, r3, r4, r5;

  State operator()(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }
};

namespace detail {

template <class State>
double scaled_rms(const State& e, const State& y0, const State& y1, double atol, double rtol) {
  const auto sc = (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
  const auto q = (e.cwiseAbs().array() / sc).eval();
  return std::sqrt(q.square().sum() / static_cast<double>(q.size()));
}

template <class State>
double scaled_rms(const State& v, const State& y0, double atol, double rtol) {
  return scaled_rms(v, y0, y0, atol, rtol);
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t_end, calling `on_step` with every accepted
/// DenseStep in order. Throws StiffnessError if the step size drops below min_step.
template <class State, class Rhs, class OnStep>
long integrate_dopri5(Rhs&& f, double t0, const State& y0, double t_end, const IntegratorOptions& opt,
                      OnStep&& on_step) {
  // Butcher tableau
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  // dense output
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

  const double span = t_end - t0;
  if (!(span > 0.0)) return 0;

  State y = y0;
  State k1 = f(t0, y);

  // Initial step guess (Hairer, Norsett & Wanner, II.4).
  double h;
  {
    const double dn0 = detail::scaled_rms(y, y, opt.atol, opt.rtol);
    const double dn1 = detail::scaled_rms(k1, y, opt.atol, opt.rtol);
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h0 = std::min(h0, span);
    const State y1 = y + h0 * k1;
    const State f1 = f(t0 + h0, y1);
    const double dn2 = detail::scaled_rms((f1 - k1).eval(), y, opt.atol, opt.rtol) / h0;
    const double m = std::max(dn1, dn2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 1.0 / 5.0);
    h = std::min({100.0 * h0, h1, span});
  }

  double t = t0;
  long steps = 0;
  bool last_rejected = false;
  while (t < t_end) {
    if (++steps > opt.max_steps) {
      std::ostringstream os;
      os << "step budget exhausted at t=" << t;
      throw StiffnessError(os.str());
    }
    if (h < opt.min_step) {
      std::ostringstream os;
      os << "step size underflow (h=" << h << ") at t=" << t;
      throw StiffnessError(os.str());
    }
    bool final_step = false;
    if (t + h >= t_end) {
      h = t_end - t;
      final_step = true;
    }

    const State k2 = f(t + c2 * h, (y + h * (a21 * k1)).eval());
    const State k3 = f(t + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
    const State k4 = f(t + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    const State k5 = f(t + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    const State k6 = f(t + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    const State ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const State k7 = f(t + h, ynew);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double en = detail::scaled_rms(err, y, ynew, opt.atol, opt.rtol);
    if (!std::isfinite(en)) {
      h *= 0.1;
      last_rejected = true;
      continue;
    }
    if (en <= 1.0) {
      DenseStep<State> step;
      step.t0 = t;
      step.h = h;
      step.r1 = y;
      step.r2 = ynew - y;
      step.r3 = h * k1 - step.r2;
      step.r4 = step.r2 - h * k7 - step.r3;
      step.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      on_step(step);

      t = final_step ? t_end : t + h;
      y = ynew;
      k1 = k7;
      double fac = en == 0.0 ? 5.0 : 0.9 * std::pow(en, -0.2);
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      h *= fac;
      last_rejected = false;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
    }
  }
  return steps;
}

/// Piecewise dense solution over [t_begin, t_end] assembled from accepted steps.
template <class State>
class DenseSolution {
 public:
  void push(const DenseStep<State>& s) { steps_.push_back(s); }

  double t_begin() const { return steps_.empty() ? 0.0 : steps_.front().t0; }
  double t_end() const { return steps_.empty() ? 0.0 : steps_.back().t0 + steps_.back().h; }
  std::size_t size() const { return steps_.size(); }

  State operator()(double t) const {
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double x, const DenseStep<State>& s) { return x < s.t0; });
    if (it != steps_.begin()) --it;
    if (t >= it->t0 + it->h) return it->r1 + it->r2;  // right end of the last step
    return (*it)(t);
  }

 private:
  std::vector<DenseStep<State>> steps_;
};

template <class State, class Rhs>
DenseSolution<State> solve_dopri5(Rhs&& f, double t0, const State& y0, double t_end,
                                  const IntegratorOptions& opt) {
  DenseSolution<State> sol;
  if (t_end <= t0) {
    DenseStep<State> s;
    s.t0 = t0;
    s.h = 1.0;
    s.r1 = y0;
    s.r2 = s.r3 = s.r4 = s.r5 = State::Zero();
    sol.push(s);
    return sol;
  }
  integrate_dopri5(f, t0, y0, t_end, opt, [&](const DenseStep<State>& s) { sol.push(s); });
  return sol;
}

/// Integrates and samples onto an ascending grid without keeping the step history.
/// Grid points must lie in [t0, ∞); the integration stops at the last grid point.
template <class State, class Rhs>
std::vector<State> sample_dopri5(Rhs&& f, double t0, const State& y0, std::span<const double> grid,
                                 const IntegratorOptions& opt) {
  std::vector<State> out;
  out.reserve(grid.size());
  std::size_t next = 0;
  while (next < grid.size() && grid[next] <= t0) {
    out.push_back(y0);
    ++next;
  }
  if (next == grid.size()) return out;
  const double t_end = grid.back();
  integrate_dopri5(f, t0, y0, t_end, opt, [&](const DenseStep<State>& s) {
    const double right = s.t0 + s.h;
    const bool last = right >= t_end;
    while (next < grid.size() && (grid[next] < right || last)) {
      out.push_back(grid[next] >= right ? State(s.r1 + s.r2) : s(grid[next]));
      ++next;
    }
  });
  return out;
}

}  // namespace gapesd
