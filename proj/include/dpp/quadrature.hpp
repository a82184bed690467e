#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "dpp/domain.hpp"

namespace dpp {

/// Averaging rule on the unit (n-1)-ball. Nodes are columns expressed in the
/// coordinates of the plane orthogonal to e1; weights sum to one.
template <typename Scalar>
struct DiskQuadrature {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
  int order = 0;

  int ball_dim() const { return static_cast<int>(nodes.rows()); }
  int size() const { return static_cast<int>(nodes.cols()); }

  /// sum_q w_q h_q h_q^T, equal to I / (n + 1) for an exact rule.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> second_moment() const {
    return nodes * weights.asDiagonal() * nodes.transpose();
  }
};

/// Gauss-Jacobi rule for weight (1 - x)^a (1 + x)^b on [-1, 1] by
/// Golub-Welsch. Returns (nodes, weights) with weights summing to the weight's
/// total mass.
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>
gauss_jacobi(int m, Scalar a, Scalar b) {
  using std::lgamma;
  using std::pow;
  using std::sqrt;
  using std::exp;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix jac = Matrix::Zero(m, m);
  const Scalar ab = a + b;
  for (int k = 0; k < m; ++k) {
    const Scalar s = Scalar(2 * k) + ab;
    jac(k, k) = (s == Scalar(0)) ? (b - a) / (ab + Scalar(2)) : (b * b - a * a) / (s * (s + Scalar(2)));
    if (k + 1 < m) {
      const Scalar j = Scalar(k + 1);
      const Scalar t = Scalar(2) * j + ab;
      const Scalar off =
          sqrt(Scalar(4) * j * (j + a) * (j + b) * (j + ab) / (t * t * (t + Scalar(1)) * (t - Scalar(1))));
      jac(k, k + 1) = off;
      jac(k + 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jac);
  const Scalar mass = pow(Scalar(2), ab + Scalar(1)) *
                      exp(lgamma(a + Scalar(1)) + lgamma(b + Scalar(1)) - lgamma(ab + Scalar(2)));
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes = eig.eigenvalues();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights = mass * eig.eigenvectors().row(0).transpose().array().square();
  return {nodes, weights};
}

/// n = 2: m-point Gauss-Legendre on [-1, 1]. n = 3: polar tensor rule with
/// m-point Gauss-Jacobi (weight r) in the radius and 2m equally spaced angles.
template <typename Scalar = double>
DiskQuadrature<Scalar> disk_quadrature(int n, int m) {
  if (m < 2) throw DomainError("disk_quadrature: order must be at least 2");
  if (n != 2 && n != 3) {
    throw DomainError("disk_quadrature: only dimensions 2 and 3 are supported");
  }
  DiskQuadrature<Scalar> q;
  q.order = m;
  if (n == 2) {
    auto [x, w] = gauss_jacobi<Scalar>(m, Scalar(0), Scalar(0));
    // symmetrize so that odd moments vanish to rounding
    for (int i = 0; i < m / 2; ++i) {
      const Scalar xs = (x[m - 1 - i] - x[i]) / Scalar(2);
      const Scalar ws = (w[m - 1 - i] + w[i]) / Scalar(2);
      x[i] = -xs;
      x[m - 1 - i] = xs;
      w[i] = ws;
      w[m - 1 - i] = ws;
    }
    if (m % 2 == 1) x[m / 2] = Scalar(0);
    q.nodes = x.transpose();
    q.weights = w / w.sum();
    return q;
  }
  // radius r in [0, 1] with density 2r: r = (1 + y) / 2, y ~ (1 + y) on [-1, 1]
  auto [y, wy] = gauss_jacobi<Scalar>(m, Scalar(0), Scalar(1));
  const int angles = 2 * m;
  q.nodes.resize(2, m * angles);
  q.weights.resize(m * angles);
  const Scalar wsum = wy.sum();
  for (int i = 0; i < m; ++i) {
    const Scalar r = (Scalar(1) + y[i]) / Scalar(2);
    for (int k = 0; k < angles; ++k) {
      using std::cos;
      using std::sin;
      const Scalar th = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(angles);
      const int col = i * angles + k;
      q.nodes(0, col) = r * cos(th);
      q.nodes(1, col) = r * sin(th);
      q.weights[col] = wy[i] / wsum / Scalar(angles);
    }
    // antipodal angle pairs k, k + m are exact negatives
    for (int k = 0; k < m; ++k) {
      q.nodes.col(i * angles + k + m) = -q.nodes.col(i * angles + k);
    }
  }
  return q;
}

}  // namespace dpp
