#include "dpp/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpp/rng.hpp"

namespace dpp {

namespace {

std::vector<int> window_slices(const Field& field, double t_low) {
  std::vector<int> js;
  for (int j = 1; j <= field.last_slice(); ++j) {
    if (field.time(j) > t_low + kTimeTol) js.push_back(j);
  }
  return js;
}

std::vector<std::size_t> nodes_in_ball(const SpatialGrid& grid, double radius, int stride) {
  std::vector<std::size_t> out;
  const Vec& c = grid.box().center();
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const Eigen::VectorXi idx = grid.multi_index(i);
    if (stride > 1 && idx.unaryExpr([stride](int v) { return v % stride; }).any()) continue;
    if ((grid.node(i) - c).norm() <= radius + 1e-12) out.push_back(i);
  }
  return out;
}

}  // namespace

ModulusReport empirical_modulus(const Field& field, double delta, double radius, std::size_t samples,
                                std::uint64_t seed) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("empirical_modulus: delta must lie in (0,1]");
  if (!(radius > 0.0)) throw DomainError("empirical_modulus: radius must be positive");
  const DppParams& p = field.params();
  const double t_top = field.time(field.last_slice());
  if (!(2.0 * radius < p.box().half_width()) || t_top - 2.0 * radius * radius < -kTimeTol) {
    throw DomainError("empirical_modulus: region is not interior (the doubled cylinder must fit in the solved window)");
  }
  ModulusReport rep;
  rep.delta = delta;
  rep.radius = radius;
  rep.t_high = t_top;
  rep.t_low = t_top - radius * radius;
  rep.seed = seed;
  rep.sup_norm = field.sup_abs();
  const std::vector<int> js = window_slices(field, rep.t_low);
  if (js.empty()) throw DomainError("empirical_modulus: no slices inside the region");
  for (int j : js) {
    if (!field.has_slice(j)) throw DomainError("empirical_modulus: slice " + std::to_string(j) + " was not kept");
  }
  const double eps_term = std::pow(p.epsilon(), delta);
  const double norm = rep.sup_norm;
  const Vec& c = p.box().center();
  const int n = field.dim();

  auto consider = [&](const Vec& x, int jx, double ux, const Vec& z, int jz, double uz) {
    if (norm == 0.0) return;
    const double dist = (x - z).norm();
    const double tdist = std::abs(field.time(jx) - field.time(jz));
    const double denom = std::pow(dist, delta) + std::pow(tdist, 0.5 * delta) + eps_term;
    const double q = std::abs(ux - uz) / denom / norm;
    if (q > rep.constant) {
      rep.constant = q;
      rep.arg_x = x;
      rep.arg_z = z;
      rep.arg_t = field.time(jx);
      rep.arg_s = field.time(jz);
    }
  };

  Rng rng(seed);
  auto sample_ball = [&]() {
    Vec x(n);
    do {
      for (int a = 0; a < n; ++a) x[a] = (2.0 * rng.uniform() - 1.0) * radius;
    } while (x.norm() > radius);
    return Vec(c + x);
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec x = sample_ball();
    const Vec z = sample_ball();
    const int jx = js[std::min(js.size() - 1, static_cast<std::size_t>(rng.uniform() * js.size()))];
    const int jz = js[std::min(js.size() - 1, static_cast<std::size_t>(rng.uniform() * js.size()))];
    consider(x, jx, field.eval_state(x, jx), z, jz, field.eval_state(z, jz));
  }
  rep.random_pairs = samples;

  // coarse sub-lattice: about 7 nodes across the ball, at most 4 slices
  const SpatialGrid& grid = field.grid();
  const int stride = std::max(1, static_cast<int>(std::floor(radius / (3.0 * grid.spacing()))));
  const std::vector<std::size_t> nodes = nodes_in_ball(grid, radius, stride);
  std::vector<int> lattice_js;
  const std::size_t want = std::min<std::size_t>(4, js.size());
  for (std::size_t k = 0; k < want; ++k) {
    lattice_js.push_back(js[want == 1 ? js.size() - 1 : k * (js.size() - 1) / (want - 1)]);
  }
  lattice_js.erase(std::unique(lattice_js.begin(), lattice_js.end()), lattice_js.end());
  struct Sample {
    Vec x;
    int j;
    double u;
  };
  std::vector<Sample> pts;
  for (int j : lattice_js) {
    const Vec& slice = field.slice(j);
    for (std::size_t i : nodes) pts.push_back({grid.node(i), j, slice[static_cast<Eigen::Index>(i)]});
  }
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      consider(pts[a].x, pts[a].j, pts[a].u, pts[b].x, pts[b].j, pts[b].u);
      ++rep.lattice_pairs;
    }
  }
  return rep;
}

TimeOscTracker::TimeOscTracker(const Field& field, double radius) {
  if (!(radius > 0.0)) throw DomainError("time_osc_check: radius must be positive");
  const DppParams& p = field.params();
  if (!(radius + p.epsilon() < p.box().half_width())) {
    throw DomainError("time_osc_check: B_{r+eps} must lie inside the domain");
  }
  t_low_ = field.time(field.last_slice()) - radius * radius;
  if (window_slices(field, t_low_).size() < 2) {
    throw DomainError("time_osc_check: region too small to contain two time slices");
  }
  inner_ = nodes_in_ball(field.grid(), radius, 1);
  outer_ = nodes_in_ball(field.grid(), radius + p.epsilon(), 1);
  if (inner_.empty()) throw DomainError("time_osc_check: no grid nodes inside B_r");
  hi_.assign(inner_.size(), -INFINITY);
  lo_.assign(inner_.size(), INFINITY);
}

void TimeOscTracker::observe(const Field& field, int j) {
  if (j < 1 || !(field.time(j) > t_low_ + kTimeTol)) return;
  const Vec& s = field.slice(j);
  for (std::size_t k = 0; k < inner_.size(); ++k) {
    const double v = s[static_cast<Eigen::Index>(inner_[k])];
    hi_[k] = std::max(hi_[k], v);
    lo_[k] = std::min(lo_[k], v);
  }
  double hi = -INFINITY, lo = INFINITY;
  for (std::size_t i : outer_) {
    hi = std::max(hi, s[static_cast<Eigen::Index>(i)]);
    lo = std::min(lo, s[static_cast<Eigen::Index>(i)]);
  }
  acc_.slice_oscillation = std::max(acc_.slice_oscillation, hi - lo);
  if (observed_ == 0) acc_.first_slice = j;
  acc_.last_slice = j;
  ++observed_;
}

TimeOscillation TimeOscTracker::result() const {
  if (observed_ < 2) throw DomainError("time_osc_check: fewer than two window slices were observed");
  TimeOscillation res = acc_;
  for (std::size_t k = 0; k < inner_.size(); ++k) res.lhs = std::max(res.lhs, hi_[k] - lo_[k]);
  res.rhs = res.factor * res.slice_oscillation;
  res.pass = res.lhs <= res.rhs + 1e-10;
  return res;
}

TimeOscillation time_osc_check(const Field& field, double radius) {
  TimeOscTracker tracker(field, radius);
  const double t_low = field.time(field.last_slice()) - radius * radius;
  for (int j : window_slices(field, t_low)) {
    if (!field.has_slice(j)) throw DomainError("time_osc_check: slice " + std::to_string(j) + " was not kept");
    tracker.observe(field, j);
  }
  return tracker.result();
}

}  // namespace dpp
