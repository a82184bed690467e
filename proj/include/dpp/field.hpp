#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "dpp/boundary.hpp"
#include "dpp/operators.hpp"
#include "dpp/params.hpp"

namespace dpp {

/// Values of u_eps on grid nodes for the time slices t_j = j eps^2 / 2.
/// Slices may be dropped once no longer needed; see SolveOptions.
class Field {
 public:
  Field(DppParams params, BoundaryData boundary, SpatialGrid grid);

  const DppParams& params() const { return params_; }
  const BoundaryData& boundary() const { return boundary_; }
  const SpatialGrid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }

  /// Index of the last slice, J = ceil(T / (eps^2 / 2)).
  int last_slice() const { return last_slice_; }
  double time(int j) const { return j * params_.time_step(); }
  bool has_slice(int j) const {
    return j >= 0 && j < static_cast<int>(slices_.size()) && slices_[static_cast<std::size_t>(j)].size() > 0;
  }
  const Vec& slice(int j) const;
  /// Number of slices computed so far (0 before solving).
  int computed_slices() const { return computed_; }
  /// Largest |value| over every slice ever computed, including dropped ones.
  double sup_abs() const { return sup_abs_; }
  double min_value() const { return min_value_; }
  double max_value() const { return max_value_; }
  /// Range of every boundary value the solver read, slice 0 included.
  double boundary_min() const { return boundary_min_; }
  double boundary_max() const { return boundary_max_; }

  /// u_eps(x, t_j): F on the strip, multilinear interpolation of slice j inside.
  double eval_state(const Vec& x, int j) const;

  /// Multilinear interpolation of slice j at a point of the closed box.
  template <int N, class Derived>
  double interpolate(const Vec& values, const Eigen::MatrixBase<Derived>& y) const {
    const int cells = grid_.cells_per_axis();
    const double inv_h = 1.0 / grid_.spacing();
    int base[N];
    double frac[N];
    std::size_t stride[N];
    std::size_t s = 1;
    for (int a = 0; a < N; ++a) {
      const double pos = (y[a] - lower_[a]) * inv_h;
      int i = static_cast<int>(std::floor(pos));
      if (i < 0) i = 0;
      if (i > cells - 1) i = cells - 1;
      base[a] = i;
      frac[a] = pos - i;
      stride[a] = s;
      s *= static_cast<std::size_t>(cells + 1);
    }
    std::size_t origin = 0;
    for (int a = 0; a < N; ++a) origin += static_cast<std::size_t>(base[a]) * stride[a];
    const double* v = values.data();
    double acc = 0.0;
    for (int corner = 0; corner < (1 << N); ++corner) {
      double w = 1.0;
      std::size_t idx = origin;
      for (int a = 0; a < N; ++a) {
        if (corner & (1 << a)) {
          w *= frac[a];
          idx += stride[a];
        } else {
          w *= 1.0 - frac[a];
        }
      }
      acc += w * v[idx];
    }
    return acc;
  }

  double interpolate(const Vec& values, const Vec& y) const;

  // Mutation used by the solver.
  void set_slice(int j, Vec values);
  void drop_slice(int j);
  void note_boundary_range(double lo, double hi);

 private:
  DppParams params_;
  BoundaryData boundary_;
  SpatialGrid grid_;
  Vec lower_;
  int last_slice_;
  int computed_ = 0;
  double sup_abs_ = 0.0;
  double min_value_ = INFINITY;
  double max_value_ = -INFINITY;
  double boundary_min_ = INFINITY;
  double boundary_max_ = -INFINITY;
  std::vector<Vec> slices_;
};

/// A u(x, nu) on slice j, nu any unit vector.
double averaging_op(const Field& field, const Vec& x, const Vec& nu, int j, const DiskQuadrature<double>& quad);

/// Midrange over the stencil's directions of A u(x, nu) on slice j.
Midrange midrange_op(const Field& field, const Vec& x, int j, const DppStencil& stencil);

}  // namespace dpp
