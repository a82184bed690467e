#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dpp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when inputs violate an operation's preconditions.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Tolerance applied at the endpoints of half-open time intervals.
inline constexpr double kTimeTol = 1e-12;
/// Tolerance applied to the outer edge of the boundary strip.
inline constexpr double kStripTol = 1e-12;

/// Axis-aligned cube {x : |x_i - c_i| < half_width}. Open set.
class Box {
 public:
  Box(Vec center, double half_width);

  int dim() const { return static_cast<int>(center_.size()); }
  const Vec& center() const { return center_; }
  double half_width() const { return half_width_; }
  double lower(int axis) const { return center_[axis] - half_width_; }
  double upper(int axis) const { return center_[axis] + half_width_; }

  template <class Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x) const {
    for (int i = 0; i < dim(); ++i) {
      if (!(std::abs(x[i] - center_[i]) < half_width_)) return false;
    }
    return true;
  }

  /// Euclidean distance from a point outside the box to the box; 0 inside or
  /// on the boundary.
  template <class Derived>
  double exterior_distance(const Eigen::MatrixBase<Derived>& x) const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) {
      const double d = std::abs(x[i] - center_[i]) - half_width_;
      if (d > 0.0) s += d * d;
    }
    return std::sqrt(s);
  }

  /// True when x lies in the closed box inflated by `pad`.
  template <class Derived>
  bool within_inflated(const Eigen::MatrixBase<Derived>& x, double pad) const {
    for (int i = 0; i < dim(); ++i) {
      if (std::abs(x[i] - center_[i]) > half_width_ + pad) return false;
    }
    return true;
  }

  std::string describe() const;

 private:
  Vec center_;
  double half_width_;
};

/// Box x (0, T] together with the step length that fixes the boundary strip.
class ParabolicCylinder {
 public:
  ParabolicCylinder(Box space, double horizon, double epsilon);

  const Box& space() const { return space_; }
  double horizon() const { return horizon_; }
  double epsilon() const { return epsilon_; }
  /// Length of one time step of the recursion, eps^2 / 2.
  double time_step() const { return 0.5 * epsilon_ * epsilon_; }
  int dim() const { return space_.dim(); }

 private:
  Box space_;
  double horizon_;
  double epsilon_;
};

enum class PointClass { Interior, ParabolicStrip, Outside };

const char* to_string(PointClass c);

/// Classifies a space-time point against the cylinder and its eps-strip.
template <class Derived>
PointClass classify(const Eigen::MatrixBase<Derived>& x, double t,
                    const ParabolicCylinder& cyl) {
  const Box& box = cyl.space();
  if (x.size() != box.dim()) {
    throw DomainError("classify: point dimension " + std::to_string(x.size()) +
                      " does not match domain dimension " +
                      std::to_string(box.dim()));
  }
  const double strip_floor = -cyl.time_step();
  const bool after_floor = t > strip_floor + kTimeTol;
  const bool up_to_horizon = t <= cyl.horizon() + kTimeTol;
  if (box.contains(x)) {
    if (t > kTimeTol && up_to_horizon) return PointClass::Interior;
    if (after_floor && t <= kTimeTol) return PointClass::ParabolicStrip;
    return PointClass::Outside;
  }
  if (box.exterior_distance(x) <= cyl.epsilon() + kStripTol && after_floor &&
      up_to_horizon) {
    return PointClass::ParabolicStrip;
  }
  return PointClass::Outside;
}

/// Uniform Cartesian grid covering the closed box. Nodes are ordered with the
/// first axis varying fastest.
class SpatialGrid {
 public:
  SpatialGrid(Box box, int cells_per_axis);

  const Box& box() const { return box_; }
  int dim() const { return box_.dim(); }
  double spacing() const { return spacing_; }
  int nodes_per_axis() const { return cells_ + 1; }
  int cells_per_axis() const { return cells_; }
  std::size_t node_count() const { return node_count_; }

  /// Multi-index of a linear node index.
  Eigen::VectorXi multi_index(std::size_t node) const;
  std::size_t linear_index(const Eigen::VectorXi& idx) const;
  Vec node(std::size_t node) const;
  double coordinate(int axis, int i) const { return box_.lower(axis) + i * spacing_; }

 private:
  Box box_;
  int cells_;
  double spacing_;
  std::size_t node_count_;
};

/// Builds a grid with spacing at most `h`, shrunk so the box width is an
/// integer number of cells.
SpatialGrid make_grid(const Box& box, double h);

}  // namespace dpp
