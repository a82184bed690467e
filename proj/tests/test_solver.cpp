#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include <doctest.h>

#include "dpp/directions.hpp"
#include "dpp/field_io.hpp"
#include "dpp/quadrature.hpp"
#include "dpp/solver.hpp"

using namespace dpp;

namespace {

struct Setup {
  DppParams params;
  SpatialGrid grid;
  DppStencil stencil;
};

Setup setup(int n = 2, double eps = 0.2, double h = 0.1, int K = 16, double T = 0.06, double alpha = 0.5) {
  DppParams p = DppParams::make(alpha, ParabolicCylinder(Box(Vec::Zero(n), 1.0), T, eps));
  SpatialGrid g = make_grid(p.box(), h);
  DppStencil s(p, direction_set(n, K), disk_quadrature(n, 2));
  return {p, g, s};
}

std::string random_expression(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-2, 2);
  std::ostringstream os;
  os << "sin(" << u(gen) << "*x1 + " << u(gen) << "*x2 + " << u(gen) << "*t) + " << u(gen) << "*x1*x2 + "
     << u(gen) << "*exp(" << 0.5 * u(gen) << "*x2)";
  return os.str();
}

}  // namespace

TEST_CASE("solve: constants are preserved exactly") {
  const Setup s = setup();
  const Field f = solve(s.params, BoundaryData::constant(2.5), s.grid, s.stencil);
  CHECK(f.last_slice() == 3);
  for (int j = 0; j <= f.last_slice(); ++j) CHECK((f.slice(j).array() - 2.5).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("solve: linear data is preserved to rounding") {
  for (int n : {2, 3}) {
    const Setup s = setup(n, 0.2, n == 2 ? 0.05 : 0.1);
    Vec a = Vec::LinSpaced(n, 0.5, -1.0);
    const auto F = BoundaryData::linear(a, 0.3);
    const Field f = solve(s.params, F, s.grid, s.stencil);
    double err = 0.0;
    for (std::size_t i = 0; i < s.grid.node_count(); ++i) {
      err = std::max(err, std::abs(f.slice(f.last_slice())[static_cast<Eigen::Index>(i)] - F(s.grid.node(i), 0.0)));
    }
    CHECK(err <= 1e-10);
  }
}

TEST_CASE("solve: maximum principle on random data") {
  std::mt19937_64 gen(17);
  const Setup s = setup(2, 0.2, 0.05, 16, 0.1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto F = BoundaryData::expression(random_expression(gen), 2);
    const Field f = solve(s.params, F, s.grid, s.stencil);
    const double tol = 1e-12 * (1 + std::max(std::abs(f.boundary_min()), std::abs(f.boundary_max())));
    CHECK(f.min_value() >= f.boundary_min() - tol);
    CHECK(f.max_value() <= f.boundary_max() + tol);
    CHECK(f.boundary_min() <= f.boundary_max());
  }
}

TEST_CASE("solve: monotone in the data and equivariant under constants") {
  const Setup s = setup(2, 0.2, 0.05, 16, 0.1);
  const auto lo = BoundaryData::expression("sin(2*x1) * cos(x2) + t", 2);
  const auto hi = BoundaryData::expression("sin(2*x1) * cos(x2) + t + 0.1 * exp(x1)", 2);
  const auto shifted = BoundaryData::expression("sin(2*x1) * cos(x2) + t + 3", 2);
  const Field a = solve(s.params, lo, s.grid, s.stencil);
  const Field b = solve(s.params, hi, s.grid, s.stencil);
  const Field c = solve(s.params, shifted, s.grid, s.stencil);
  for (int j = 0; j <= a.last_slice(); ++j) {
    CHECK((b.slice(j) - a.slice(j)).minCoeff() >= -1e-13);
    CHECK((c.slice(j).array() - a.slice(j).array() - 3.0).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("solve: symmetric data gives a symmetric field when K is a multiple of 4") {
  const Setup s = setup(2, 0.2, 0.05, 32, 0.1);
  const auto F = BoundaryData::expression("exp(x1^2 * x2^2) + x1^2 + x2^2 + cos(3 * x1 * x2) + t", 2);
  const Field f = solve(s.params, F, s.grid, s.stencil);
  const int per = s.grid.nodes_per_axis();
  const Vec& v = f.slice(f.last_slice());
  double gap = 0.0;
  for (int i = 0; i < per; ++i) {
    for (int k = 0; k < per; ++k) {
      const double a = v[i + per * k], b = v[k + per * i], c = v[(per - 1 - i) + per * k];
      gap = std::max({gap, std::abs(a - b), std::abs(a - c)});
    }
  }
  CHECK(gap <= 1e-12);
}

TEST_CASE("solve: windowed storage and slice callback") {
  const Setup s = setup();
  SolveOptions opt;
  opt.window = 2;
  int calls = 0;
  opt.on_slice = [&](const Field& f, int j) {
    CHECK(f.has_slice(j));
    CHECK(j == calls);
    ++calls;
  };
  const Field f = solve(s.params, BoundaryData::quadratic(), s.grid, s.stencil, opt);
  CHECK(calls == f.last_slice() + 1);
  CHECK(f.has_slice(f.last_slice()));
  CHECK(!f.has_slice(0));
  CHECK_THROWS_AS(f.slice(0), DomainError);

  const Field full = solve(s.params, BoundaryData::quadratic(), s.grid, s.stencil);
  CHECK((full.slice(full.last_slice()) - f.slice(f.last_slice())).norm() == 0.0);
  CHECK(full.sup_abs() == f.sup_abs());
}

TEST_CASE("solve: thread count does not change the result") {
  const Setup s = setup(2, 0.2, 0.02, 16, 0.1);
  const auto F = BoundaryData::expression("sin(3*x1) + x2*t", 2);
  SolveOptions many;
  many.threads = 4;
  const Field a = solve(s.params, F, s.grid, s.stencil);
  const Field b = solve(s.params, F, s.grid, s.stencil, many);
  CHECK((a.slice(a.last_slice()) - b.slice(b.last_slice())).norm() == 0.0);
  CHECK(a.boundary_min() == b.boundary_min());
  CHECK(a.boundary_max() == b.boundary_max());
}

TEST_CASE("solve: non-finite values and mismatches are rejected") {
  const Setup s = setup();
  CHECK_THROWS_AS(solve(s.params, BoundaryData::expression("sqrt(x1)", 2), s.grid, s.stencil), SolveError);
  CHECK_THROWS_AS(solve(s.params, BoundaryData::expression("sqrt(0.03 - t)", 2), s.grid, s.stencil), SolveError);

  const Setup other = setup(2, 0.1);
  CHECK_THROWS_AS(solve(s.params, BoundaryData::constant(1), s.grid, other.stencil), DomainError);
  const Setup three = setup(3, 0.2, 0.25);
  CHECK_THROWS_AS(solve(s.params, BoundaryData::constant(1), s.grid, three.stencil), DomainError);
  CHECK_THROWS_AS(solve(s.params, BoundaryData::constant(1), three.grid, s.stencil), DomainError);
}

TEST_CASE("field CSV: round trip and sidecar") {
  const Setup s = setup();
  const auto F = BoundaryData::exp_heat(1.0, 0.5);
  const auto dir = std::filesystem::temp_directory_path() / "dpplab_csv_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "field.csv";
  const Field f = solve(s.params, F, s.grid, s.stencil);
  {
    FieldCsvWriter w(path, 2);
    for (int j = 0; j <= f.last_slice(); ++j) w.write_slice(f, j);
    w.close();
  }
  const auto rows = read_field_csv(path);
  REQUIRE(rows.size() == s.grid.node_count() * static_cast<std::size_t>(f.last_slice() + 1));
  for (std::size_t r = 0; r < rows.size(); r += 13) {
    const FieldCsvRow& row = rows[r];
    const std::size_t node = s.grid.linear_index(Eigen::Map<const Eigen::VectorXi>(row.index.data(), 2));
    CHECK(row.value == f.slice(row.j)[static_cast<Eigen::Index>(node)]);
    CHECK(row.t == f.time(row.j));
    CHECK(row.x[0] == s.grid.node(node)[0]);
  }
  const auto meta = field_sidecar(f, s.stencil);
  CHECK(meta["params"]["epsilon"] == 0.2);
  CHECK(meta["time_lattice"]["last_slice"] == f.last_slice());
  CHECK(meta["boundary"]["kind"] == "exp_heat");
  const auto back = BoundaryData::expression(meta["boundary"]["expression"].get<std::string>(), 2);
  const Vec x = (Vec(2) << 0.3, -0.1).finished();
  CHECK(back(x, 0.04) == doctest::Approx(F(x, 0.04)).epsilon(1e-14));

  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  std::filesystem::remove_all(dir);
}
