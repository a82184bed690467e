#pragma once

#include "dpp/operators.hpp"
#include "dpp/params.hpp"

namespace dpp {

enum class BarrierSide {
  /// c + 7 A t / r^2 + 2 A |x|^2 / r^2, a discrete supersolution
  Upper,
  /// c - 7 A t / r^2 - 2 A |x|^2 / r^2, a discrete subsolution
  Lower,
};

struct BarrierCheck {
  BarrierSide side = BarrierSide::Upper;
  /// Upper: max over samples of midrange A v(x, nu, t - eps^2/2) - v(x, t).
  /// Lower: the min of the same difference.
  double extreme = 0.0;
  /// -(3/2) A eps^2 / r^2 for Upper, +(3/2) A eps^2 / r^2 for Lower.
  double bound = 0.0;
  double tolerance = 0.0;
  /// Signed distance to failure; non-negative when the check passes.
  double margin = 0.0;
  bool pass = false;
  std::size_t samples = 0;
};

/// Evaluates the barrier analytically (|x| taken from the box center) on
/// the grid nodes of B_r at five times in (-r^2, 0).
BarrierCheck barrier_check(double A, double r, double c, const DppParams& params, const DppStencil& stencil,
                           const SpatialGrid& grid, BarrierSide side = BarrierSide::Upper);

}  // namespace dpp
