#pragma once

// Closed-form eigendecomposition of a general complex 3x3 matrix: Cardano on the
// characteristic cubic, Newton polishing, eigenvectors from cross products of rows of
// (M - λI).

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

namespace gapesd {

using cplx = std::complex<double>;

/// Roots of the monic cubic z^3 + a z^2 + b z + c.
inline std::array<cplx, 3> solve_cubic(cplx a, cplx b, cplx c) {
  const cplx shift = a / 3.0;
  const cplx p = b - a * a / 3.0;
  const cplx q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;

  std::array<cplx, 3> y{};
  const cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  // Take the branch with the larger |u^3| to avoid cancellation.
  cplx u3 = -q / 2.0 + disc;
  const cplx u3_alt = -q / 2.0 - disc;
  if (std::abs(u3_alt) > std::abs(u3)) u3 = u3_alt;

  if (std::abs(u3) == 0.0) {
    y = {cplx{0.0}, cplx{0.0}, cplx{0.0}};  // p = q = 0: triple root
  } else {
    const cplx u = std::pow(u3, 1.0 / 3.0);
    const cplx omega{-0.5, std::sqrt(3.0) / 2.0};
    cplx uk = u;
    for (int k = 0; k < 3; ++k) {
      y[k] = uk - p / (3.0 * uk);
      uk *= omega;
    }
  }

  std::array<cplx, 3> z{};
  auto f = [&](cplx x) { return ((x + a) * x + b) * x + c; };
  auto df = [&](cplx x) { return (3.0 * x + 2.0 * a) * x + b; };
  for (int k = 0; k < 3; ++k) {
    cplx x = y[k] - shift;
    cplx fx = f(x);
    for (int it = 0; it < 4; ++it) {
      const cplx d = df(x);
      if (std::abs(d) == 0.0) break;
      const cplx xn = x - fx / d;
      const cplx fn = f(xn);
      if (!(std::abs(fn) < std::abs(fx))) break;
      x = xn;
      fx = fn;
    }
    z[k] = x;
  }
  return z;
}

struct Eigensystem3 {
  std::array<cplx, 3> values;
  Eigen::Matrix3cd vectors;  ///< column k pairs with values[k], unit 2-norm
};

/// Null vector of (M - λI): the cross product of the two rows of largest cross-product norm.
inline Eigen::Vector3cd null_vector(const Eigen::Matrix3cd& m, cplx lambda) {
  Eigen::Matrix3cd a = m - lambda * Eigen::Matrix3cd::Identity();
  auto cross = [](const Eigen::RowVector3cd& r, const Eigen::RowVector3cd& s) {
    Eigen::Vector3cd v;
    v << r(1) * s(2) - r(2) * s(1), r(2) * s(0) - r(0) * s(2), r(0) * s(1) - r(1) * s(0);
    return v;
  };
  std::array<Eigen::Vector3cd, 3> cand = {cross(a.row(0), a.row(1)), cross(a.row(0), a.row(2)),
                                          cross(a.row(1), a.row(2))};
  auto best = std::max_element(cand.begin(), cand.end(),
                               [](const auto& x, const auto& y) { return x.norm() < y.norm(); });
  Eigen::Vector3cd v = *best;
  const double n = v.norm();
  if (n == 0.0) {
    // rank(M - λI) <= 1: any vector orthogonal (bilinearly) to the non-zero row works.
    int r = 0;
    for (int i = 1; i < 3; ++i)
      if (a.row(i).norm() > a.row(r).norm()) r = i;
    if (a.row(r).norm() == 0.0) return Eigen::Vector3cd::UnitX();
    const Eigen::RowVector3cd row = a.row(r);
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(row(i)) > std::abs(row(k))) k = i;
    const int j = (k + 1) % 3;
    v.setZero();
    v(j) = row(k);
    v(k) = -row(j);
    return v.normalized();
  }
  return v / n;
}

inline Eigensystem3 eigen_decompose(const Eigen::Matrix3cd& m) {
  const cplx tr = m.trace();
  const cplx minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                      m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  const cplx det = m.determinant();
  Eigensystem3 es;
  es.values = solve_cubic(-tr, minors, -det);
  for (int k = 0; k < 3; ++k) es.vectors.col(k) = null_vector(m, es.values[k]);
  return es;
}

/// Smallest pairwise eigenvalue gap divided by the largest eigenvalue magnitude.
inline double relative_eigen_gap(const std::array<cplx, 3>& ev) {
  double scale = 0.0;
  for (auto v : ev) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  const double gap = std::min({std::abs(ev[0] - ev[1]), std::abs(ev[0] - ev[2]), std::abs(ev[1] - ev[2])});
  return gap / scale;
}

}  // namespace gapesd
