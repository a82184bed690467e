#include "dpp/domain.hpp"

#include <cmath>
#include <sstream>

namespace dpp {

Box::Box(Vec center, double half_width)
    : center_(std::move(center)), half_width_(half_width) {
  if (center_.size() < 2) throw DomainError("Box: dimension must be at least 2");
  if (!(half_width_ > 0.0) || !std::isfinite(half_width_)) {
    throw DomainError("Box: half_width must be positive");
  }
  if (!center_.allFinite()) throw DomainError("Box: center must be finite");
}

std::string Box::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "box";
  for (int i = 0; i < dim(); ++i) {
    os << (i == 0 ? " " : " x ") << "[" << lower(i) << "," << upper(i) << "]";
  }
  return os.str();
}

ParabolicCylinder::ParabolicCylinder(Box space, double horizon, double epsilon)
    : space_(std::move(space)), horizon_(horizon), epsilon_(epsilon) {
  if (!(horizon_ > 0.0)) throw DomainError("ParabolicCylinder: T must be positive");
  if (!(epsilon_ > 0.0)) throw DomainError("ParabolicCylinder: epsilon must be positive");
  if (!(epsilon_ < space_.half_width())) {
    throw DomainError("ParabolicCylinder: epsilon must be smaller than the box half width");
  }
}

const char* to_string(PointClass c) {
  switch (c) {
    case PointClass::Interior:
      return "Interior";
    case PointClass::ParabolicStrip:
      return "ParabolicStrip";
    case PointClass::Outside:
      return "Outside";
  }
  return "?";
}

SpatialGrid::SpatialGrid(Box box, int cells_per_axis)
    : box_(std::move(box)), cells_(cells_per_axis) {
  if (cells_ < 2) throw DomainError("SpatialGrid: need at least 3 nodes per axis");
  spacing_ = 2.0 * box_.half_width() / cells_;
  node_count_ = 1;
  for (int i = 0; i < dim(); ++i) node_count_ *= static_cast<std::size_t>(cells_ + 1);
}

Eigen::VectorXi SpatialGrid::multi_index(std::size_t node) const {
  Eigen::VectorXi idx(dim());
  const auto n = static_cast<std::size_t>(nodes_per_axis());
  for (int a = 0; a < dim(); ++a) {
    idx[a] = static_cast<int>(node % n);
    node /= n;
  }
  return idx;
}

std::size_t SpatialGrid::linear_index(const Eigen::VectorXi& idx) const {
  std::size_t lin = 0;
  const auto n = static_cast<std::size_t>(nodes_per_axis());
  for (int a = dim() - 1; a >= 0; --a) lin = lin * n + static_cast<std::size_t>(idx[a]);
  return lin;
}

Vec SpatialGrid::node(std::size_t node) const {
  const Eigen::VectorXi idx = multi_index(node);
  Vec x(dim());
  for (int a = 0; a < dim(); ++a) x[a] = coordinate(a, idx[a]);
  return x;
}

SpatialGrid make_grid(const Box& box, double h) {
  if (!(h > 0.0)) throw DomainError("make_grid: spacing must be positive");
  if (h > box.half_width() * (1.0 + 1e-12)) {
    throw DomainError("make_grid: spacing must not exceed the box half width");
  }
  const double width = 2.0 * box.half_width();
  // ceil with slack so that exact divisors are not bumped by rounding noise
  const int cells = static_cast<int>(std::ceil(width / h - 1e-9));
  return SpatialGrid(box, std::max(cells, 2));
}

}  // namespace dpp
