#pragma once

#include <cstdint>
#include <vector>

#include "dpp/field.hpp"

namespace dpp {

/// Parabolic sub-cylinder Q_r = B_r(box center) x (t_top - r^2, t_top] of a
/// solved field, where t_top is its last slice time.
struct ModulusReport {
  double delta = 1.0;
  double radius = 0.0;
  double t_low = 0.0;
  double t_high = 0.0;
  /// sup |u(x,t) - u(z,s)| / (|x-z|^delta + |t-s|^(delta/2) + eps^delta) / ||u||_inf
  double constant = 0.0;
  double sup_norm = 0.0;
  Vec arg_x, arg_z;
  double arg_t = 0.0, arg_s = 0.0;
  std::size_t random_pairs = 0;
  std::size_t lattice_pairs = 0;
  std::uint64_t seed = 0;
};

/// Mixes `samples` random pairs with every pair from a coarse node/slice
/// sub-lattice of Q_r. Requires the doubled cylinder Q_2r inside the solved
/// window and every slice of Q_r kept in the field.
ModulusReport empirical_modulus(const Field& field, double delta, double radius, std::size_t samples,
                                std::uint64_t seed);

struct TimeOscillation {
  /// max over nodes x in B_r and window slices s < t of |u(x,t) - u(x,s)|
  double lhs = 0.0;
  /// max over window slices of the oscillation over nodes of B_{r+eps}
  double slice_oscillation = 0.0;
  double factor = 18.0;
  double rhs = 0.0;
  bool pass = false;
  int first_slice = 0;
  int last_slice = 0;
};

/// Streaming form of time_osc_check: feed slices in order as they are
/// computed; slices outside the window are ignored.
class TimeOscTracker {
 public:
  TimeOscTracker(const Field& field, double radius);
  void observe(const Field& field, int j);
  /// Throws DomainError if fewer than two window slices were observed.
  TimeOscillation result() const;

 private:
  double t_low_;
  std::vector<std::size_t> inner_;
  std::vector<std::size_t> outer_;
  std::vector<double> hi_, lo_;
  TimeOscillation acc_;
  int observed_ = 0;
};

/// Time oscillation against 18 times the largest eps^2/2-slice oscillation,
/// over slices j >= 1 with t_j > t_top - r^2.
TimeOscillation time_osc_check(const Field& field, double radius);

}  // namespace dpp
