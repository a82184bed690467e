#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "dpp/domain.hpp"

namespace dpp {

/// Finite, antipodally closed subset of the unit sphere. Column k is a
/// direction; columns k and k + K/2 are antipodes.
template <typename Scalar>
struct DirectionSet {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> directions;

  int dim() const { return static_cast<int>(directions.rows()); }
  int size() const { return static_cast<int>(directions.cols()); }
  auto operator[](int k) const { return directions.col(k); }
};

namespace detail {

// cos/sin of 2*pi*k/K, exact at multiples of a quarter turn.
template <typename Scalar>
std::pair<Scalar, Scalar> unit_circle(long k, long count) {
  if ((4 * k) % count == 0) {
    switch ((4 * k / count) % 4) {
      case 0: return {Scalar(1), Scalar(0)};
      case 1: return {Scalar(0), Scalar(1)};
      case 2: return {Scalar(-1), Scalar(0)};
      default: return {Scalar(0), Scalar(-1)};
    }
  }
  const Scalar angle = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(count);
  using std::cos;
  using std::sin;
  return {cos(angle), sin(angle)};
}

}  // namespace detail

/// n = 2: K equally spaced angles starting at e1. n = 3: K/2 Fibonacci points
/// on the upper hemisphere followed by their antipodes.
template <typename Scalar = double>
DirectionSet<Scalar> direction_set(int n, int count) {
  if (count < 4 || count % 2 != 0) {
    throw DomainError("direction_set: count must be even and at least 4");
  }
  if (n != 2 && n != 3) {
    throw DomainError("direction_set: only dimensions 2 and 3 are supported, got " + std::to_string(n));
  }
  const int half = count / 2;
  DirectionSet<Scalar> set;
  set.directions.resize(n, count);
  if (n == 2) {
    for (int k = 0; k < half; ++k) {
      const auto [c, s] = detail::unit_circle<Scalar>(k, count);
      set.directions(0, k) = c;
      set.directions(1, k) = s;
    }
  } else {
    using std::cos;
    using std::sin;
    using std::sqrt;
    const Scalar golden = std::numbers::pi_v<Scalar> * (Scalar(3) - sqrt(Scalar(5)));
    for (int k = 0; k < half; ++k) {
      const Scalar z = (Scalar(k) + Scalar(0.5)) / Scalar(half);
      const Scalar rho = sqrt(Scalar(1) - z * z);
      const Scalar phi = golden * Scalar(k);
      set.directions(0, k) = rho * cos(phi);
      set.directions(1, k) = rho * sin(phi);
      set.directions(2, k) = z;
      set.directions.col(k).normalize();
    }
  }
  set.directions.rightCols(half) = -set.directions.leftCols(half);
  return set;
}

}  // namespace dpp
