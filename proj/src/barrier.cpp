#include "dpp/barrier.hpp"

#include <cmath>
#include <limits>

namespace dpp {

BarrierCheck barrier_check(double A, double r, double c, const DppParams& params, const DppStencil& stencil,
                           const SpatialGrid& grid, BarrierSide side) {
  if (!(A >= 0.0) || !std::isfinite(A)) throw DomainError("barrier_check: A must be non-negative");
  if (!(r > 0.0 && r < 1.0)) throw DomainError("barrier_check: r must lie in (0,1)");
  const double sign = side == BarrierSide::Upper ? 1.0 : -1.0;
  const double k = A / (r * r);
  const Vec& center = grid.box().center();
  auto barrier = [&](const Vec& x, double t) { return c + sign * (7.0 * k * t + 2.0 * k * (x - center).squaredNorm()); };

  const double eps = params.epsilon();
  const int n = params.dim();
  BarrierCheck res;
  res.side = side;
  res.bound = -sign * 1.5 * k * eps * eps;
  // Quadratics are integrated exactly up to the rule's second-moment error;
  // the remainder is rounding, scaled by the magnitudes involved.
  const DiskQuadrature<double>& quad = stencil.quadrature();
  const double moment_error = std::abs(quad.second_moment().trace() - double(n - 1) / double(n + 1));
  const double scale = std::abs(c) + k * (7.0 * r * r + 2.0 * (r + eps) * (r + eps));
  res.tolerance = 2.0 * k * eps * eps * params.beta * moment_error + 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale);

  res.extreme = sign > 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  const int times = 5;
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const Vec x = grid.node(i);
    if ((x - center).norm() > r) continue;
    for (int s = 0; s < times; ++s) {
      const double t = -r * r * (s + 0.5) / times;
      const Midrange m = stencil.midrange([&](const Vec& y) { return barrier(y, t - params.time_step()); }, x);
      const double diff = m.value - barrier(x, t);
      res.extreme = sign > 0 ? std::max(res.extreme, diff) : std::min(res.extreme, diff);
      ++res.samples;
    }
  }
  if (res.samples == 0) throw DomainError("barrier_check: no grid nodes inside B_r");
  res.margin = sign > 0 ? (res.bound + res.tolerance) - res.extreme : res.extreme - (res.bound - res.tolerance);
  res.pass = res.margin >= 0.0;
  return res;
}

}  // namespace dpp
