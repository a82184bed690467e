#include "dpp/solver.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <vector>
#include <sstream>

#include "dpp/parallel.hpp"

namespace dpp {

namespace {

template <int N>
using Point = Eigen::Matrix<double, N, 1>;

// One term of a direction's averaging operator expressed directly on node
// values: for a grid node x every stencil point x + o has the same cell offset
// and the same multilinear weights, so A u(x, nu_k) = sum weight * u[i + shift].
struct Tap {
  std::ptrdiff_t shift;
  double weight;
};
using DirectionTaps = std::vector<Tap>;

template <int N>
std::vector<DirectionTaps> build_taps(const SpatialGrid& grid, const Eigen::Matrix<double, N, Eigen::Dynamic>& offsets,
                                      const Vec& weights, int K, int P) {
  const double inv_h = 1.0 / grid.spacing();
  const auto stride_base = static_cast<std::ptrdiff_t>(grid.nodes_per_axis());
  std::vector<DirectionTaps> out(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    std::map<std::ptrdiff_t, double> merged;
    for (int p = 0; p < P; ++p) {
      const auto o = offsets.col(static_cast<Eigen::Index>(k) * P + p);
      std::ptrdiff_t base[N];
      double frac[N];
      for (int a = 0; a < N; ++a) {
        const double pos = o[a] * inv_h;
        const double fl = std::floor(pos);
        base[a] = static_cast<std::ptrdiff_t>(fl);
        frac[a] = pos - fl;
      }
      for (int corner = 0; corner < (1 << N); ++corner) {
        double w = weights[p];
        std::ptrdiff_t shift = 0;
        std::ptrdiff_t stride = 1;
        for (int a = 0; a < N; ++a) {
          const bool up = corner & (1 << a);
          w *= up ? frac[a] : 1.0 - frac[a];
          shift += (base[a] + (up ? 1 : 0)) * stride;
          stride *= stride_base;
        }
        if (w != 0.0) merged[shift] += w;
      }
    }
    for (const auto& [shift, w] : merged) out[static_cast<std::size_t>(k)].push_back({shift, w});
  }
  return out;
}

template <int N>
void march(Field& field, const DppStencil& stencil, const SolveOptions& options) {
  const BoundaryData& F = field.boundary();
  const SpatialGrid& grid = field.grid();
  const Box& box = grid.box();
  const std::size_t nodes = grid.node_count();
  const Point<N> center = box.center();
  const double hw = box.half_width();
  const int cells = grid.cells_per_axis();
  const int K = stencil.direction_count();
  const int P = stencil.points_per_direction();
  const Eigen::Matrix<double, N, Eigen::Dynamic> offsets = stencil.offsets();
  const Vec weights = stencil.weights();

  auto inside = [&](const Point<N>& y) {
    for (int a = 0; a < N; ++a) {
      if (!(std::abs(y[a] - center[a]) < hw)) return false;
    }
    return true;
  };
  auto node_point = [&](std::size_t node) {
    Point<N> x;
    for (int a = 0; a < N; ++a) {
      x[a] = grid.coordinate(a, static_cast<int>(node % static_cast<std::size_t>(cells + 1)));
      node /= static_cast<std::size_t>(cells + 1);
    }
    return x;
  };
  auto check_finite = [&](const Vec& values, int j) {
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) {
        std::ostringstream os;
        os << "solve: non-finite value at slice " << j << " (t = " << field.time(j) << "), node " << i << " x = ("
           << node_point(static_cast<std::size_t>(i)).transpose() << ")";
        throw SolveError(os.str());
      }
    }
  };
  auto retain = [&](int j) {
    if (options.window > 0 && j - options.window >= 0) {
      const int old = j - options.window;
      if (field.time(old) < options.keep_from_time - kTimeTol) field.drop_slice(old);
    }
    if (options.on_slice) options.on_slice(field, j);
  };

  std::mutex range_mutex;
  auto merge_range = [&](double lo, double hi) {
    if (lo > hi) return;
    std::lock_guard<std::mutex> lock(range_mutex);
    field.note_boundary_range(lo, hi);
  };

  {
    Vec first(static_cast<Eigen::Index>(nodes));
    parallel_for(nodes, options.threads, [&](std::size_t b, std::size_t e) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t i = b; i < e; ++i) {
        const double v = F(node_point(i), 0.0);
        first[static_cast<Eigen::Index>(i)] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      merge_range(lo, hi);
    });
    check_finite(first, 0);
    field.set_slice(0, std::move(first));
    retain(0);
  }

  const std::vector<DirectionTaps> taps = build_taps<N>(grid, offsets, weights, K, P);
  // nodes whose whole stencil stays inside the box use the precomputed taps
  const double safe = hw - stencil.epsilon() - 4.0 * kStripTol * (1.0 + hw);

  for (int j = 1; j <= field.last_slice(); ++j) {
    const double t = field.time(j);
    const double t_prev = field.time(j - 1);
    const bool prev_is_initial = (j - 1 == 0);
    const Vec& prev = field.slice(j - 1);
    Vec next(static_cast<Eigen::Index>(nodes));

    parallel_for(nodes, options.threads, [&](std::size_t b, std::size_t e) {
      double f_lo = INFINITY, f_hi = -INFINITY;
      auto boundary = [&](const Point<N>& y, double time) {
        const double v = F(y, time);
        f_lo = std::min(f_lo, v);
        f_hi = std::max(f_hi, v);
        return v;
      };
      auto eval_prev = [&](const Point<N>& y) {
        if (!prev_is_initial && inside(y)) return field.template interpolate<N>(prev, y);
        return boundary(y, t_prev);
      };
      Point<N> y;
      const double* v = prev.data();
      for (std::size_t i = b; i < e; ++i) {
        const Point<N> x = node_point(i);
        double value;
        if (!inside(x)) {
          value = boundary(x, t);
        } else {
          double hi = -std::numeric_limits<double>::infinity();
          double lo = std::numeric_limits<double>::infinity();
          const bool fast = !prev_is_initial && ((x - center).cwiseAbs().array() < safe).all();
          for (int k = 0; k < K; ++k) {
            double acc = 0.0;
            if (fast) {
              const double* base = v + i;
              for (const Tap& tap : taps[static_cast<std::size_t>(k)]) acc += tap.weight * base[tap.shift];
            } else {
              for (int p = 0; p < P; ++p) {
                y = x + offsets.col(static_cast<Eigen::Index>(k) * P + p);
                acc += weights[p] * eval_prev(y);
              }
            }
            hi = std::max(hi, acc);
            lo = std::min(lo, acc);
          }
          value = 0.5 * (hi + lo);
        }
        next[static_cast<Eigen::Index>(i)] = value;
      }
      merge_range(f_lo, f_hi);
    });

    check_finite(next, j);
    field.set_slice(j, std::move(next));
    retain(j);
  }
}

}  // namespace

Field solve(const DppParams& params, const BoundaryData& boundary, const SpatialGrid& grid,
            const DppStencil& stencil, const SolveOptions& options) {
  if (grid.dim() != params.dim() || stencil.dim() != params.dim()) {
    throw DomainError("solve: dimension mismatch between params, grid and stencil");
  }
  if (std::abs(stencil.epsilon() - params.epsilon()) > 1e-15 || std::abs(stencil.alpha() - params.alpha) > 1e-15) {
    throw DomainError("solve: stencil was built for different alpha/epsilon");
  }
  Field field(params, boundary, grid);
  switch (params.dim()) {
    case 2: march<2>(field, stencil, options); break;
    case 3: march<3>(field, stencil, options); break;
    default: throw DomainError("solve: only dimensions 2 and 3 are supported");
  }
  return field;
}

}  // namespace dpp
