#pragma once

#include "dpp/domain.hpp"

namespace dpp {

/// Full problem instance: weights, step length and cylinder.
struct DppParams {
  double alpha;
  double beta;
  ParabolicCylinder cylinder;

  /// beta is stored as 1 - alpha.
  static DppParams make(double alpha, ParabolicCylinder cylinder) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    return DppParams{alpha, 1.0 - alpha, std::move(cylinder)};
  }

  double epsilon() const { return cylinder.epsilon(); }
  double time_step() const { return cylinder.time_step(); }
  double horizon() const { return cylinder.horizon(); }
  int dim() const { return cylinder.dim(); }
  const Box& box() const { return cylinder.space(); }
};

}  // namespace dpp
