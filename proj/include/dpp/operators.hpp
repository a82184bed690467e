#pragma once

#include <limits>

#include <Eigen/Core>

#include "dpp/directions.hpp"
#include "dpp/frame.hpp"
#include "dpp/params.hpp"
#include "dpp/quadrature.hpp"

namespace dpp {

/// Sup, inf and their mean over a direction set; indices are the lowest
/// maximizing and minimizing directions.
struct Midrange {
  double value = 0.0;
  double max = 0.0;
  double min = 0.0;
  int argmax = -1;
  int argmin = -1;
};

/// Sample points and weights of the averaging operator
///   A u(x, nu) = alpha u(x + eps nu) + beta avg_{B_eps^nu} u(x + h)
/// for one direction: point 0 is the pull target, the rest are the ball
/// quadrature nodes rotated by the direction's frame.
template <class DerivedNu>
std::pair<Mat, Vec> averaging_points(const Eigen::MatrixBase<DerivedNu>& nu, double alpha, double eps,
                                     const DiskQuadrature<double>& quad) {
  const int n = static_cast<int>(nu.size());
  if (quad.ball_dim() != n - 1) throw DomainError("averaging: quadrature does not match dimension");
  const Frame<double> frame = orthonormal_frame<double>(nu);
  Mat offsets(n, 1 + quad.size());
  Vec weights(1 + quad.size());
  offsets.col(0) = eps * nu;
  weights[0] = alpha;
  offsets.rightCols(quad.size()).noalias() = eps * frame.matrix.rightCols(n - 1) * quad.nodes;
  weights.tail(quad.size()) = (1.0 - alpha) * quad.weights;
  return {std::move(offsets), std::move(weights)};
}

/// Averaging operator applied to an arbitrary evaluator u(y).
template <class Eval, class DerivedX, class DerivedNu>
double average_along(Eval&& u, const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedNu>& nu,
                     double alpha, double eps, const DiskQuadrature<double>& quad) {
  const auto [offsets, weights] = averaging_points(nu, alpha, eps, quad);
  double acc = 0.0;
  Vec y(x.size());
  for (Eigen::Index p = 0; p < offsets.cols(); ++p) {
    y = x + offsets.col(p);
    acc += weights[p] * u(y);
  }
  return acc;
}

/// Precomputed averaging stencils for every direction of a set.
class DppStencil {
 public:
  DppStencil(const DppParams& params, DirectionSet<double> dirs, DiskQuadrature<double> quad);

  int dim() const { return dim_; }
  int direction_count() const { return dirs_.size(); }
  int points_per_direction() const { return points_; }
  const DirectionSet<double>& directions() const { return dirs_; }
  const DiskQuadrature<double>& quadrature() const { return quad_; }
  double alpha() const { return alpha_; }
  double epsilon() const { return eps_; }

  /// Offsets of direction k occupy columns [k * points, (k + 1) * points).
  const Mat& offsets() const { return offsets_; }
  const Vec& weights() const { return weights_; }

  template <class Eval, class Derived>
  double average(Eval&& u, const Eigen::MatrixBase<Derived>& x, int k) const {
    double acc = 0.0;
    Vec y(dim_);
    for (int p = 0; p < points_; ++p) {
      y = x + offsets_.col(k * points_ + p);
      acc += weights_[p] * u(y);
    }
    return acc;
  }

  template <class Eval, class Derived>
  Midrange midrange(Eval&& u, const Eigen::MatrixBase<Derived>& x) const {
    Midrange r;
    r.max = -std::numeric_limits<double>::infinity();
    r.min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < direction_count(); ++k) {
      const double a = average(u, x, k);
      if (a > r.max) {
        r.max = a;
        r.argmax = k;
      }
      if (a < r.min) {
        r.min = a;
        r.argmin = k;
      }
    }
    r.value = 0.5 * (r.max + r.min);
    return r;
  }

 private:
  int dim_;
  int points_;
  double alpha_;
  double eps_;
  DirectionSet<double> dirs_;
  DiskQuadrature<double> quad_;
  Mat offsets_;
  Vec weights_;
};

}  // namespace dpp
