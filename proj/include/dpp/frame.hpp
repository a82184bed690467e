#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "dpp/domain.hpp"

namespace dpp {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Orthogonal matrix M with M e1 = nu.
template <typename Scalar>
struct Frame {
  MatrixX<Scalar> matrix;

  auto direction() const { return matrix.col(0); }
  int dim() const { return static_cast<int>(matrix.rows()); }
};

namespace detail {

template <typename Scalar, class Derived>
void require_unit(const Eigen::MatrixBase<Derived>& v, const char* who) {
  using std::abs;
  if (v.size() < 2) throw DomainError(std::string(who) + ": dimension must be at least 2");
  if (!(abs(v.norm() - Scalar(1)) <= Scalar(1e-10))) {
    throw DomainError(std::string(who) + ": direction must be a unit vector");
  }
}

/// Any unit vector orthogonal to u (u unit).
template <typename Scalar, class Derived>
VectorX<Scalar> orthogonal_unit(const Eigen::MatrixBase<Derived>& u) {
  Eigen::Index k = 0;
  u.cwiseAbs().minCoeff(&k);
  VectorX<Scalar> w = VectorX<Scalar>::Unit(u.size(), k);
  w -= u.dot(w) * u;
  return w.normalized();
}

}  // namespace detail

/// Householder reflection sending e1 to nu; identity when nu = e1.
template <typename Scalar, class Derived>
Frame<Scalar> orthonormal_frame(const Eigen::MatrixBase<Derived>& nu) {
  detail::require_unit<Scalar>(nu, "orthonormal_frame");
  const Eigen::Index n = nu.size();
  VectorX<Scalar> w = -nu.template cast<Scalar>();
  w[0] += Scalar(1);
  const Scalar w2 = w.squaredNorm();
  MatrixX<Scalar> m = MatrixX<Scalar>::Identity(n, n);
  if (w2 > Scalar(0)) m.noalias() -= (Scalar(2) / w2) * w * w.transpose();
  // The reflection maps e1 to nu only up to rounding; pin the first column.
  m.col(0) = nu.template cast<Scalar>();
  return {std::move(m)};
}

/// Rotation by the smallest angle taking unit u to unit v, acting in span{u, v}.
/// For v = -u a half turn in a plane through u is used.
template <typename Scalar, class DerivedU, class DerivedV>
MatrixX<Scalar> minimal_rotation(const Eigen::MatrixBase<DerivedU>& u,
                                 const Eigen::MatrixBase<DerivedV>& v) {
  using std::atan2;
  using std::cos;
  using std::sin;
  const Eigen::Index n = u.size();
  const Scalar c = u.dot(v);
  VectorX<Scalar> w = v - c * u;
  const Scalar s = w.norm();
  MatrixX<Scalar> r = MatrixX<Scalar>::Identity(n, n);
  if (s <= Scalar(1e-14)) {
    if (c > Scalar(0)) return r;
    w = detail::orthogonal_unit<Scalar>(u);
    r.noalias() -= Scalar(2) * (u * u.transpose() + w * w.transpose());
    return r;
  }
  w /= s;
  const Scalar theta = atan2(s, c);
  r.noalias() += (cos(theta) - Scalar(1)) * (u * u.transpose() + w * w.transpose());
  r.noalias() += sin(theta) * (w * u.transpose() - u * w.transpose());
  return r;
}

/// Frames P_x, P_z with P_x e1 = nu_x, P_z e1 = nu_z whose actions on the
/// plane orthogonal to e1 differ by at most |nu_x + nu_z|.
template <typename Scalar, class DerivedX, class DerivedZ>
std::pair<Frame<Scalar>, Frame<Scalar>> paired_frames(const Eigen::MatrixBase<DerivedX>& nu_x,
                                                      const Eigen::MatrixBase<DerivedZ>& nu_z) {
  detail::require_unit<Scalar>(nu_x, "paired_frames");
  detail::require_unit<Scalar>(nu_z, "paired_frames");
  if (nu_x.size() != nu_z.size()) throw DomainError("paired_frames: dimension mismatch");
  Frame<Scalar> px = orthonormal_frame<Scalar>(nu_x);
  MatrixX<Scalar> flipped = px.matrix;
  flipped.col(0) *= Scalar(-1);
  const VectorX<Scalar> from = -nu_x.template cast<Scalar>();
  const VectorX<Scalar> to = nu_z.template cast<Scalar>();
  MatrixX<Scalar> pz = minimal_rotation<Scalar>(from, to) * flipped;
  pz.col(0) = to;
  return {std::move(px), Frame<Scalar>{std::move(pz)}};
}

}  // namespace dpp
