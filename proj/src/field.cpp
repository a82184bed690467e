#include "dpp/field.hpp"

#include <algorithm>
#include <string>

namespace dpp {

DppStencil::DppStencil(const DppParams& params, DirectionSet<double> dirs, DiskQuadrature<double> quad)
    : dim_(params.dim()),
      points_(1 + quad.size()),
      alpha_(params.alpha),
      eps_(params.epsilon()),
      dirs_(std::move(dirs)),
      quad_(std::move(quad)) {
  if (dirs_.dim() != dim_) throw DomainError("DppStencil: direction set dimension mismatch");
  if (dirs_.size() == 0) throw DomainError("DppStencil: empty direction set");
  if (quad_.ball_dim() != dim_ - 1) throw DomainError("DppStencil: quadrature dimension mismatch");
  offsets_.resize(dim_, static_cast<Eigen::Index>(dirs_.size()) * points_);
  for (int k = 0; k < dirs_.size(); ++k) {
    auto [off, w] = averaging_points(dirs_[k], alpha_, eps_, quad_);
    offsets_.middleCols(static_cast<Eigen::Index>(k) * points_, points_) = off;
    if (k == 0) weights_ = w;
  }
}

Field::Field(DppParams params, BoundaryData boundary, SpatialGrid grid)
    : params_(std::move(params)), boundary_(std::move(boundary)), grid_(std::move(grid)) {
  const Box& pb = params_.box();
  const Box& gb = grid_.box();
  if (pb.dim() != gb.dim() || (pb.center() - gb.center()).cwiseAbs().maxCoeff() > 1e-12 ||
      std::abs(pb.half_width() - gb.half_width()) > 1e-12) {
    throw DomainError("Field: grid box differs from the cylinder box");
  }
  lower_ = gb.center().array() - gb.half_width();
  last_slice_ = static_cast<int>(std::ceil(params_.horizon() / params_.time_step() - 1e-9));
  last_slice_ = std::max(last_slice_, 1);
  slices_.resize(static_cast<std::size_t>(last_slice_) + 1);
}

const Vec& Field::slice(int j) const {
  if (!has_slice(j)) throw DomainError("Field: slice " + std::to_string(j) + " is not available");
  return slices_[static_cast<std::size_t>(j)];
}

void Field::set_slice(int j, Vec values) {
  if (j < 0 || j > last_slice_) throw DomainError("Field: slice index out of range");
  if (values.size() != static_cast<Eigen::Index>(grid_.node_count())) {
    throw DomainError("Field: slice size does not match grid");
  }
  sup_abs_ = std::max(sup_abs_, values.cwiseAbs().maxCoeff());
  min_value_ = std::min(min_value_, values.minCoeff());
  max_value_ = std::max(max_value_, values.maxCoeff());
  computed_ = std::max(computed_, j + 1);
  slices_[static_cast<std::size_t>(j)] = std::move(values);
}

void Field::drop_slice(int j) {
  if (j >= 0 && j <= last_slice_) slices_[static_cast<std::size_t>(j)] = Vec();
}

double Field::interpolate(const Vec& values, const Vec& y) const {
  switch (dim()) {
    case 2: return interpolate<2>(values, y);
    case 3: return interpolate<3>(values, y);
    default: throw DomainError("Field: only dimensions 2 and 3 are supported");
  }
}

void Field::note_boundary_range(double lo, double hi) {
  boundary_min_ = std::min(boundary_min_, lo);
  boundary_max_ = std::max(boundary_max_, hi);
}

double Field::eval_state(const Vec& x, int j) const {
  if (x.size() != dim()) throw DomainError("eval_state: dimension mismatch");
  if (j < 0 || j > last_slice_) throw DomainError("eval_state: slice " + std::to_string(j) + " out of range");
  const double eps = params_.epsilon();
  if (!grid_.box().within_inflated(x, eps + kStripTol)) {
    throw DomainError("eval_state: point lies outside the box inflated by epsilon");
  }
  const double t = time(j);
  switch (classify(x, t, params_.cylinder)) {
    case PointClass::ParabolicStrip:
      return boundary_(x, t);
    case PointClass::Interior:
      return interpolate(slice(j), x);
    case PointClass::Outside:
      break;
  }
  throw DomainError("eval_state: point is outside the cylinder and its strip");
}

double averaging_op(const Field& field, const Vec& x, const Vec& nu, int j, const DiskQuadrature<double>& quad) {
  const DppParams& p = field.params();
  return average_along([&](const Vec& y) { return field.eval_state(y, j); }, x, nu, p.alpha, p.epsilon(), quad);
}

Midrange midrange_op(const Field& field, const Vec& x, int j, const DppStencil& stencil) {
  return stencil.midrange([&](const Vec& y) { return field.eval_state(y, j); }, x);
}

}  // namespace dpp
