#pragma once

#include <functional>
#include <limits>
#include <stdexcept>

#include "dpp/field.hpp"

namespace dpp {

/// Non-finite value produced during the recursion.
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  /// Worker threads for the node loop; 0 = one per hardware thread.
  unsigned threads = 1;
  /// Keep only the most recent `window` slices (0 keeps everything)...
  int window = 0;
  /// ...except slices with t_j >= keep_from_time, which are always kept.
  double keep_from_time = std::numeric_limits<double>::infinity();
  /// Called after each slice j (including 0) is stored.
  std::function<void(const Field&, int)> on_slice;
};

/// Marches the DPP from t = 0 to the first lattice time >= T. Slice 0 holds
/// F(., 0); a later slice holds F on strip nodes and the midrange of the
/// averaging operator over the previous slice elsewhere.
Field solve(const DppParams& params, const BoundaryData& boundary, const SpatialGrid& grid,
            const DppStencil& stencil, const SolveOptions& options = {});

}  // namespace dpp
