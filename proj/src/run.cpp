#include "dpp/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>

#include "dpp/aux_functions.hpp"
#include "dpp/barrier.hpp"
#include "dpp/expansion.hpp"
#include "dpp/field_io.hpp"
#include "dpp/frame.hpp"
#include "dpp/game.hpp"
#include "dpp/modulus.hpp"
#include "dpp/quadrature.hpp"
#include "dpp/solver.hpp"

namespace dpp {

namespace {

namespace fs = std::filesystem;

// Files written by the current run, removed again if it fails.
struct Artifacts {
  fs::path dir;
  std::vector<fs::path> files;

  fs::path add(const std::string& name) {
    files.push_back(dir / name);
    return files.back();
  }
};

struct Context {
  const RunConfig& config;
  const RunOptions& options;
  Artifacts& artifacts;
  Report& report;

  void log(const std::string& line) const {
    if (options.log) *options.log << line << std::endl;
  }
};

CheckRecord check(std::string name, nlohmann::json parameters, double value, double margin, double tolerance,
                  std::string reference, std::optional<std::uint64_t> seed = std::nullopt) {
  CheckRecord c;
  c.name = std::move(name);
  c.parameters = std::move(parameters);
  c.value = value;
  c.margin = margin;
  c.tolerance = tolerance;
  c.reference = std::move(reference);
  c.seed = seed;
  return c;
}

// Calls fn(i, x) for every node, x updated in place (first axis fastest).
template <class Fn>
void for_each_node(const SpatialGrid& grid, Fn&& fn) {
  const int n = grid.dim();
  const int per_axis = grid.cells_per_axis() + 1;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Vec x(n);
  for (int a = 0; a < n; ++a) x[a] = grid.coordinate(a, 0);
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    fn(i, x);
    for (int a = 0; a < n; ++a) {
      if (++idx[a] < per_axis) {
        x[a] = grid.coordinate(a, idx[a]);
        break;
      }
      idx[a] = 0;
      x[a] = grid.coordinate(a, 0);
    }
  }
}

nlohmann::json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

CheckRecord max_principle_check(const Field& field, double eps) {
  const double lo = field.boundary_min(), hi = field.boundary_max();
  const double tol = 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
  const double margin = std::min(field.min_value() - lo, hi - field.max_value());
  return check("max_principle",
               {{"epsilon", eps},
                {"boundary_min", lo},
                {"boundary_max", hi},
                {"field_min", field.min_value()},
                {"field_max", field.max_value()}},
               -margin, margin, tol,
               "discrete maximum principle: every value lies between the extreme boundary values the update reads");
}

CheckRecord time_osc_record(const TimeOscillation& osc, double eps, double radius) {
  return check("time_oscillation",
               {{"epsilon", eps}, {"radius", radius}, {"factor", osc.factor},
                {"slice_oscillation", osc.slice_oscillation}, {"rhs", osc.rhs},
                {"first_slice", osc.first_slice}, {"last_slice", osc.last_slice}},
               osc.lhs, osc.rhs - osc.lhs, 1e-10,
               "time oscillation at fixed x is at most 18 times the largest eps^2/2-slice oscillation");
}

// Streams the time-oscillation check through SolveOptions::on_slice when the
// field's geometry admits it (B_{r+eps} inside the box, two window slices).
struct OscillationWatch {
  double radius;
  std::unique_ptr<TimeOscTracker> tracker;
  bool skipped = false;

  void observe(const Field& f, int j) {
    if (j == 0 && !tracker && !skipped) {
      try {
        tracker = std::make_unique<TimeOscTracker>(f, radius);
      } catch (const DomainError&) {
        skipped = true;
      }
    }
    if (tracker) tracker->observe(f, j);
  }

  void report(Report& report, double eps) const {
    if (tracker) report.add_check(time_osc_record(tracker->result(), eps, radius));
  }
};

// ---------------------------------------------------------------- solve

void run_solve(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const DppParams p = cfg.params();
  const SpatialGrid grid = cfg.grid();
  const BoundaryData F = cfg.boundary();
  const DppStencil stencil = cfg.stencil();
  const int n = p.dim();
  const std::string kind = cfg.text("F.kind");
  const bool exact_kind = kind == "constant" || kind == "linear";
  const bool heat = kind == "exp_heat";

  FieldCsvWriter writer(ctx.artifacts.add("field.csv"), n);
  ctx.report.add_artifact("field.csv");
  double exact_error = 0.0;
  double heat_error = 0.0;
  const double k = cfg.real("F.k");
  const Vec center = p.box().center();
  const double hw = p.box().half_width();

  OscillationWatch watch{cfg.real("regularity.osc_radius"), nullptr};
  SolveOptions opts;
  opts.threads = ctx.options.threads;
  opts.window = 2;
  opts.on_slice = [&](const Field& f, int j) {
    watch.observe(f, j);
    writer.write_slice(f, j);
    const Vec& s = f.slice(j);
    const double t = f.time(j);
    if (exact_kind) {
      for_each_node(grid, [&](std::size_t i, const Vec& x) {
        exact_error = std::max(exact_error, std::abs(s[static_cast<Eigen::Index>(i)] - F(x, t)));
      });
    }
    if (heat && j >= 1) {
      for_each_node(grid, [&](std::size_t i, const Vec& x) {
        if (((x - center).cwiseAbs().array() < hw).all()) {
          const double exact = std::exp(p.alpha * k * k * t + k * x[0]);
          heat_error = std::max(heat_error, std::abs(s[static_cast<Eigen::Index>(i)] - exact));
        }
      });
    }
  };
  ctx.log("solve: " + std::to_string(grid.node_count()) + " nodes, spacing " + format_double(grid.spacing()));
  const Field field = solve(p, F, grid, stencil, opts);
  writer.close();
  {
    std::ofstream side(ctx.artifacts.add("field.json"));
    side << field_sidecar(field, stencil).dump(2) << '\n';
    ctx.report.add_artifact("field.json");
  }

  ctx.report.add_check(max_principle_check(field, p.epsilon()));
  watch.report(ctx.report, p.epsilon());
  if (exact_kind) {
    const double tol = kind == "constant" ? 1e-12 : 1e-10;
    ctx.report.add_check(check("exact_preservation", {{"kind", kind}}, exact_error, -exact_error, tol,
                               "constant and grid-aligned linear data are reproduced exactly by the recursion"));
  }
  ctx.report.measure("field", {{"nodes", grid.node_count()},
                               {"spacing", grid.spacing()},
                               {"last_slice", field.last_slice()},
                               {"final_time", field.time(field.last_slice())},
                               {"min", field.min_value()},
                               {"max", field.max_value()},
                               {"sup_abs", field.sup_abs()}});
  if (heat) ctx.report.measure("closed_form_sup_error", heat_error);
}

// ---------------------------------------------------------------- simulate

Strategy make_strategy(const RunConfig& cfg, int player, const std::shared_ptr<const Field>& field,
                       const std::shared_ptr<const DppStencil>& stencil) {
  const std::string id = std::to_string(player);
  const std::string& kind = cfg.text("game.player" + id);
  if (kind == "greedy_max") return greedy_strategy(field, stencil, GreedyMode::Max);
  if (kind == "greedy_min") return greedy_strategy(field, stencil, GreedyMode::Min);
  if (kind == "fixed") return Strategy::fixed_direction(cfg.vec("game.nu" + id));
  return Strategy::pull_toward(cfg.vec("game.target" + id));
}

void run_simulate(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const DppParams p = cfg.params();
  const BoundaryData F = cfg.boundary();
  auto stencil = std::make_shared<const DppStencil>(cfg.stencil());
  OscillationWatch watch{cfg.real("regularity.osc_radius"), nullptr};
  SolveOptions opts;
  opts.threads = ctx.options.threads;
  opts.on_slice = [&](const Field& f, int j) { watch.observe(f, j); };
  ctx.log("simulate: solving the reference field");
  auto field = std::make_shared<const Field>(solve(p, F, cfg.grid(), *stencil, opts));
  ctx.report.add_check(max_principle_check(*field, p.epsilon()));
  watch.report(ctx.report, p.epsilon());

  const Vec start = cfg.vec("game.start");
  const double t0 = cfg.has("game.start_time") ? cfg.real("game.start_time") : field->time(field->last_slice());
  GameConfig game{p, F, start, t0, cfg.seed()};
  game.validate();
  const Strategy s1 = make_strategy(cfg, 1, field, stencil);
  const Strategy s2 = make_strategy(cfg, 2, field, stencil);
  const auto trials = static_cast<std::size_t>(cfg.integer("game.trials"));
  ctx.log("simulate: " + std::to_string(trials) + " trajectories");
  const std::vector<GameOutcome> outcomes = simulate(game, s1, s2, trials, ctx.options.threads);
  write_outcomes_csv(ctx.artifacts.add("outcomes.csv"), outcomes);
  ctx.report.add_artifact("outcomes.csv");
  const ValueEstimate est = summarize(outcomes, cfg.seed());

  const int bound = step_bound(t0, p.epsilon());
  ctx.report.add_check(check("termination_bound", {{"start_time", t0}, {"bound", bound}}, est.max_steps,
                             bound - est.max_steps, 0.0, "every game ends within ceil(2 t0 / eps^2) + 1 rounds",
                             cfg.seed()));
  nlohmann::json estimate = {{"mean", est.mean},
                             {"std_error", est.std_error},
                             {"trials", est.trials},
                             {"seed", est.seed},
                             {"degenerate", est.degenerate},
                             {"max_steps", est.max_steps},
                             {"fallbacks", est.fallbacks},
                             {"substream_scheme", kSubstreamScheme},
                             {"player1", s1.name()},
                             {"player2", s2.name()}};

  const double jr = t0 / p.time_step();
  const int j0 = static_cast<int>(std::lround(jr));
  const bool lattice = std::abs(jr - j0) < 1e-9 && j0 >= 1 && j0 <= field->last_slice();
  const bool greedy = cfg.text("game.player1").rfind("greedy", 0) == 0 && cfg.text("game.player2").rfind("greedy", 0) == 0;
  if (lattice) {
    const double u0 = field->eval_state(start, j0);
    estimate["field_value"] = u0;
    if (greedy) {
      const double slack = 0.05;
      const double diff = std::abs(est.mean - u0);
      ctx.report.add_check(check("solver_consistency",
                                 {{"field_value", u0}, {"mean", est.mean}, {"std_error", est.std_error},
                                  {"slack", slack}},
                                 diff, 3.0 * est.std_error + slack - diff, 0.0,
                                 "greedy-vs-greedy game value agrees with the DPP solution at the start point",
                                 cfg.seed()));
    }
  }
  ctx.report.measure("estimate", estimate);
}

// ---------------------------------------------------------------- verify-expansion

double fitted_rate(const std::vector<double>& eps, const std::vector<double>& r) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double x = std::log(eps[i]), y = std::log(std::abs(r[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void run_verify_expansion(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const DppParams p = cfg.params();
  const int n = p.dim();
  const int m = static_cast<int>(cfg.integer("stencil.m"));
  const double eps = p.epsilon();
  const EffectivePde pde = effective_pde_coefficients(p);
  ctx.report.measure("effective_pde", {{"c_inf", pde.c_inf}, {"c_lap", pde.c_lap}});

  // |y|^2 at the origin, configured directions and a dense sweep
  const double expected = p.alpha * eps * eps + p.beta * eps * eps * (n - 1) / (n + 1);
  auto square = [](const Vec& y) { return y.squaredNorm(); };
  const Vec origin = Vec::Zero(n);
  const DppStencil stencil = cfg.stencil();
  const double got = stencil.midrange(square, origin).value;
  ctx.report.add_check(check("quadratic_identity", {{"epsilon", eps}, {"K", stencil.direction_count()}, {"expected", expected}},
                             got, -std::abs(got - expected), 1e-10,
                             "midrange of the averaging operator on |y|^2 at the origin is alpha eps^2 + beta eps^2 (n-1)/(n+1)"));
  const DppStencil dense(p, direction_set(n, 10000), disk_quadrature(n, m));
  const double sweep = dense.midrange(square, origin).value;
  ctx.report.add_check(check("quadratic_identity_sweep", {{"epsilon", eps}, {"K", 10000}, {"expected", expected}},
                             sweep, -std::abs(sweep - expected), 1e-10,
                             "dense 10^4-direction sweep of the same midrange agrees"));

  // linear data: every second-order term vanishes
  const Vec x = cfg.vec("expansion.x");
  const double t = cfg.real("expansion.t");
  {
    Vec e1 = Vec::Zero(n);
    e1[0] = 1.0;
    const auto phi = SmoothTestFunction::quadratic(Mat::Zero(n, n), e1, 0.0);
    const double r = expansion_residual(phi, x, t, p, stencil).residual;
    ctx.report.add_check(check("linear_expansion", {{"epsilon", eps}}, r, -std::abs(r), 1e-10,
                               "the expansion residual of x1 vanishes"));
  }

  // random quadratics against the sphere-sup residual plus the direction bound
  const auto count = static_cast<int>(cfg.integer("expansion.quadratics"));
  const double min_grad = cfg.real("expansion.min_gradient");
  std::vector<int> Ks;
  for (double k : cfg.list("expansion.directions")) Ks.push_back(static_cast<int>(k));
  Rng rng = Rng::substream(cfg.seed(), 1);
  std::vector<std::vector<double>> residuals(static_cast<std::size_t>(count));
  std::vector<double> worst_ratio(Ks.size(), 0.0), worst_tol(Ks.size(), 0.0), worst_sphere(Ks.size(), 0.0);
  std::vector<double> coverings;
  std::vector<DppStencil> stencils;
  for (int K : Ks) {
    stencils.emplace_back(p, direction_set(n, K), disk_quadrature(n, m));
    coverings.push_back(covering_angle(stencils.back().directions()));
  }
  for (int q = 0; q < count; ++q) {
    Mat H(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) H(a, b) = H(b, a) = 2.0 * rng.uniform() - 1.0;
    }
    Vec b(n);
    do {
      for (int a = 0; a < n; ++a) b[a] = 2.0 * rng.uniform() - 1.0;
    } while ((H * x + b).norm() < min_grad);
    const double c = 2.0 * rng.uniform() - 1.0;
    const double d = 2.0 * rng.uniform() - 1.0;
    const auto phi = SmoothTestFunction::quadratic(H, b, c, d);
    const Vec grad = H * x + b;
    for (std::size_t k = 0; k < Ks.size(); ++k) {
      const double r = expansion_residual(phi, x, t, p, stencils[k]).residual;
      const QuadraticExpansionBound bound = quadratic_expansion_bound(H, grad, p, stencils[k], coverings[k]);
      residuals[static_cast<std::size_t>(q)].push_back(r);
      worst_ratio[k] = std::max(worst_ratio[k], std::abs(r) / bound.tolerance);
      worst_tol[k] = std::max(worst_tol[k], bound.tolerance);
      worst_sphere[k] = std::max(worst_sphere[k], std::abs(bound.sphere_residual));
    }
  }
  for (std::size_t k = 0; k < Ks.size(); ++k) {
    ctx.report.add_check(check("quadratic_expansion",
                               {{"K", Ks[k]}, {"m", m}, {"epsilon", eps}, {"quadratics", count},
                                {"covering_angle", coverings[k]}, {"max_tolerance", worst_tol[k]},
                                {"max_sphere_residual", worst_sphere[k]}},
                               worst_ratio[k], 1.0 - worst_ratio[k], 1e-12,
                               "expansion residual on quadratics within the sphere-sup residual plus the direction "
                               "covering bound (value is the worst |R| / tol)",
                               cfg.seed()));
  }
  if (Ks.size() >= 2) {
    double margin = INFINITY, worst = 0.0;
    for (const auto& rs : residuals) {
      for (std::size_t k = 0; k + 1 < rs.size(); ++k) {
        const double floor = 1e-9;
        margin = std::min(margin, 1.1 * std::abs(rs[k]) + floor - std::abs(rs[k + 1]));
        worst = std::max(worst, std::abs(rs[k + 1]) / std::max(std::abs(rs[k]), floor));
      }
    }
    ctx.report.add_check(check("quadratic_expansion_monotone", {{"directions", Ks}, {"noise", 0.1}}, worst, margin,
                               0.0, "|R| does not grow (beyond 10%) as the direction count doubles", cfg.seed()));
  }
  ctx.report.measure("quadratic_residuals", residuals);

  // heat profile exp(alpha k^2 t + k x1) over the epsilon ladder
  const double k = cfg.real("F.k");
  const auto phi = SmoothTestFunction::exp_heat(p.alpha, k, n);
  std::vector<double> eps_list = cfg.list("expansion.epsilons"), rs;
  for (double e : eps_list) {
    const DppParams pe = cfg.params_with_epsilon(e);
    rs.push_back(expansion_residual(phi, x, t, pe, cfg.stencil_for(pe)).residual);
  }
  ctx.report.measure("exp_heat_residuals", {{"epsilons", eps_list}, {"residuals", rs}});
  if (eps_list.size() >= 2) {
    const double rate = fitted_rate(eps_list, rs);
    const double lo = 0.7, hi = 1.3;
    ctx.report.add_check(check("exp_heat_rate", {{"epsilons", eps_list}, {"residuals", rs}, {"window", {lo, hi}}},
                               rate, std::min(rate - lo, hi - rate), 0.0,
                               "fitted decay rate of the heat-profile expansion residual lies in the first-order window"));
  }
}

// ---------------------------------------------------------------- verify-regularity

void run_verify_regularity(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const BoundaryData F = cfg.boundary();
  const double r = cfg.real("regularity.radius");
  const double osc_r = cfg.real("regularity.osc_radius");
  const double delta = cfg.real("regularity.delta");
  const auto samples = static_cast<std::size_t>(cfg.integer("regularity.samples"));
  std::vector<double> constants;
  nlohmann::json moduli = nlohmann::json::array();
  std::uint64_t index = 0;
  for (double eps : cfg.list("regularity.epsilons")) {
    const DppParams p = cfg.params_with_epsilon(eps);
    const SpatialGrid grid = cfg.grid_for(p);
    const DppStencil stencil = cfg.stencil_for(p);
    const Field probe(p, F, grid);
    const double t_top = probe.time(probe.last_slice());
    std::unique_ptr<TimeOscTracker> tracker;
    SolveOptions opts;
    opts.threads = ctx.options.threads;
    opts.window = 2;
    opts.keep_from_time = t_top - r * r;
    opts.on_slice = [&](const Field& f, int j) {
      if (j == 0) tracker = std::make_unique<TimeOscTracker>(f, osc_r);
      tracker->observe(f, j);
    };
    ctx.log("verify-regularity: eps " + format_double(eps) + ", " + std::to_string(grid.node_count()) + " nodes");
    const Field field = solve(p, F, grid, stencil, opts);
    ctx.report.add_check(max_principle_check(field, eps));

    const TimeOscillation osc = tracker->result();
    ctx.report.add_check(time_osc_record(osc, eps, osc_r));

    const std::uint64_t seed = cfg.seed() + 1000 * (++index);
    const ModulusReport mod = empirical_modulus(field, delta, r, samples, seed);
    constants.push_back(mod.constant);
    moduli.push_back({{"epsilon", eps},
                      {"spacing", grid.spacing()},
                      {"delta", mod.delta},
                      {"radius", mod.radius},
                      {"t_low", mod.t_low},
                      {"t_high", mod.t_high},
                      {"constant", mod.constant},
                      {"sup_norm", mod.sup_norm},
                      {"arg_x", mod.arg_x.size() ? vec_json(mod.arg_x) : nlohmann::json(nullptr)},
                      {"arg_z", mod.arg_z.size() ? vec_json(mod.arg_z) : nlohmann::json(nullptr)},
                      {"arg_t", mod.arg_t},
                      {"arg_s", mod.arg_s},
                      {"random_pairs", mod.random_pairs},
                      {"lattice_pairs", mod.lattice_pairs},
                      {"seed", mod.seed}});
  }
  ctx.report.measure("moduli", moduli);
  if (constants.size() >= 2) {
    const double hi = *std::max_element(constants.begin(), constants.end());
    const double lo = *std::min_element(constants.begin(), constants.end());
    const double ratio = hi == 0.0 ? 1.0 : (lo == 0.0 ? INFINITY : hi / lo);
    ctx.report.add_check(check("modulus_stability", {{"constants", constants}, {"delta", delta}, {"factor", 2.0}},
                               ratio, 2.0 - ratio, 0.0,
                               "normalized parabolic modulus constant is stable across eps within a factor 2",
                               cfg.seed()));
  }
}

// ---------------------------------------------------------------- verify-barrier

void run_verify_barrier(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const SpatialGrid grid = make_grid(cfg.box(), cfg.real("barrier.h"));
  const std::string side = cfg.text("barrier.side");
  std::vector<BarrierSide> sides;
  if (side != "lower") sides.push_back(BarrierSide::Upper);
  if (side != "upper") sides.push_back(BarrierSide::Lower);
  const double c = cfg.real("barrier.c");
  for (double eps : cfg.list("barrier.epsilons")) {
    const DppParams p = cfg.params_with_epsilon(eps);
    const DppStencil stencil = cfg.stencil_for(p);
    for (double A : cfg.list("barrier.A")) {
      for (double r : cfg.list("barrier.r")) {
        for (BarrierSide s : sides) {
          const BarrierCheck res = barrier_check(A, r, c, p, stencil, grid, s);
          const bool upper = s == BarrierSide::Upper;
          ctx.report.add_check(check(upper ? "barrier_upper" : "barrier_lower",
                                     {{"A", A}, {"r", r}, {"epsilon", eps}, {"c", c}, {"bound", res.bound},
                                      {"samples", res.samples}},
                                     res.extreme, res.margin - res.tolerance, res.tolerance,
                                     upper ? "midrange A v - v <= -(3/2) A eps^2 / r^2 for the upper barrier"
                                           : "midrange A v - v >= (3/2) A eps^2 / r^2 for the lower barrier"));
        }
      }
    }
  }
}

// ---------------------------------------------------------------- verify-aux

Vec random_unit(Rng& rng, int n) {
  Vec v(n);
  double s;
  do {
    for (int a = 0; a < n; ++a) v[a] = 2.0 * rng.uniform() - 1.0;
    s = v.squaredNorm();
  } while (s > 1.0 || s < 1e-12);
  return v / std::sqrt(s);
}

void run_verify_aux(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const int n = cfg.dim();
  const double eps = cfg.real("params.epsilon");

  // paired frames
  {
    const auto pairs = static_cast<int>(cfg.integer("aux.pairs"));
    const auto per_pair = static_cast<int>(cfg.integer("aux.samples"));
    Rng rng = Rng::substream(cfg.seed(), 2);
    double worst = -INFINITY;
    for (int q = 0; q < pairs; ++q) {
      Vec nx = random_unit(rng, n), nz = random_unit(rng, n);
      if (q == 0) nz = -nx;
      if (q == 1) nz = nx;
      if (q == 2) {
        nx = Vec::Zero(n);
        nx[0] = 1.0;
        nz = Vec::Zero(n);
        nz[0] = -std::cos(0.1);
        nz[1] = -std::sin(0.1);
      }
      const auto [px, pz] = paired_frames<double>(nx, nz);
      const Mat diff = px.matrix.rightCols(n - 1) - pz.matrix.rightCols(n - 1);
      const double bound = (nx + nz).norm();
      for (int s = 0; s < per_pair; ++s) {
        const Vec h = random_unit(rng, n - 1);
        worst = std::max(worst, (diff * h).norm() - bound);
      }
    }
    ctx.report.add_check(check("paired_rotation", {{"pairs", pairs}, {"samples_per_pair", per_pair}, {"dim", n}}, worst,
                               -worst, 1e-10,
                               "paired frames move e1-orthogonal unit vectors by at most |nu_x + nu_z|", cfg.seed()));
  }

  // omega
  for (double gamma : cfg.list("aux.gammas")) {
    for (double w0 : cfg.list("aux.omega0s")) {
      const OmegaCheck oc = omega_check(gamma, w0, static_cast<int>(cfg.integer("aux.samples")));
      const double margin = std::min({oc.min_derivative - 0.5, 1.0 - oc.max_derivative, -oc.max_second_derivative,
                                      1.0 - oc.fd_ratio, oc.increasing ? 0.0 : -1.0, -std::abs(oc.omega_at_zero)});
      ctx.report.add_check(check("omega_properties",
                                 {{"gamma", gamma}, {"omega0", w0}, {"omega1", oc.omega1},
                                  {"min_derivative", oc.min_derivative}, {"max_derivative", oc.max_derivative},
                                  {"max_second_derivative", oc.max_second_derivative}, {"fd_ratio", oc.fd_ratio},
                                  {"increasing", oc.increasing}},
                                 oc.min_derivative, margin, 1e-12,
                                 "omega(0) = 0, omega' in [1/2, 1], omega'' < 0 and omega increasing on (0, omega1]"));
      const ConcaveModulus<double> w(gamma, w0);
      bool rejected = false;
      try {
        w(1.01 * w.omega1());
      } catch (const DomainError&) {
        rejected = true;
      }
      ctx.report.add_check(check("omega_domain", {{"gamma", gamma}, {"omega0", w0}}, rejected ? 1.0 : 0.0,
                                 rejected ? 0.0 : -1.0, 0.0, "omega is not evaluated beyond omega1"));
    }
  }

  // f2 annuli and H
  AuxiliaryFunctions<double> aux{cfg.real("aux.C"), cfg.real("aux.M"), static_cast<int>(cfg.integer("aux.N")),
                                 cfg.real("aux.delta"), eps, cfg.real("aux.r")};
  aux.validate();
  Rng rng = Rng::substream(cfg.seed(), 3);
  const int samples = static_cast<int>(cfg.integer("aux.samples"));
  const double width = eps / 10.0;
  double annulus_error = 0.0;
  double order_margin = INFINITY;
  double prev = INFINITY;
  const Vec x0 = cfg.vec("box.center");
  for (int i = 0; i <= aux.N + 1; ++i) {
    const double expected = i <= aux.N ? std::pow(aux.C, 2.0 * (aux.N - i)) * std::pow(eps, aux.delta) : 0.0;
    for (int s = 0; s < samples / (aux.N + 2) + 1; ++s) {
      double d;
      if (i == 0) {
        d = 0.0;
      } else if (i <= aux.N) {
        d = (i - 1 + (1.0 - rng.uniform())) * width;
      } else {
        d = aux.N * width * (1.0 + 1e-9) + rng.uniform() * eps;
      }
      const Vec z = x0 + d * random_unit(rng, n);
      annulus_error = std::max(annulus_error, std::abs(aux.f2(x0, z) - expected));
    }
    order_margin = std::min(order_margin, prev - expected);
    prev = expected;
  }
  const double scale = std::pow(aux.C, 2.0 * aux.N) * std::pow(eps, aux.delta);
  ctx.report.add_check(check("f2_annuli", {{"C", aux.C}, {"N", aux.N}, {"delta", aux.delta}, {"epsilon", eps}},
                             annulus_error, -annulus_error, 1e-12 * scale,
                             "f2 equals C^(2(N-i)) eps^delta on annulus i and vanishes beyond N eps / 10", cfg.seed()));
  ctx.report.add_check(check("f2_nonincreasing", {{"N", aux.N}}, order_margin, order_margin, 0.0,
                             "f2 is nonincreasing in the annulus index"));

  double h_error = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec x = x0 + aux.r * rng.uniform() * random_unit(rng, n);
    const Vec z = x0 + aux.r * rng.uniform() * random_unit(rng, n);
    const double t = -aux.r * aux.r * rng.uniform();
    const double u = -aux.r * aux.r * rng.uniform();
    const double recon = aux.f1(x, z) - aux.f2(x, z) + aux.g(t, u);
    h_error = std::max(h_error, std::abs(aux.H(x, z, t, u) - recon));
  }
  ctx.report.add_check(check("h_reconstruction", {{"samples", samples}}, h_error, -h_error, 1e-12,
                             "H = f1 - f2 + g pointwise", cfg.seed()));
}

Report execute_into(const RunConfig& config, const RunOptions& options, Artifacts& artifacts) {
  const auto t0 = std::chrono::steady_clock::now();
  Report report(config);
  Context ctx{config, options, artifacts, report};
  switch (config.command()) {
    case Command::Solve: run_solve(ctx); break;
    case Command::Simulate: run_simulate(ctx); break;
    case Command::VerifyExpansion: run_verify_expansion(ctx); break;
    case Command::VerifyRegularity: run_verify_regularity(ctx); break;
    case Command::VerifyBarrier: run_verify_barrier(ctx); break;
    case Command::VerifyAux: run_verify_aux(ctx); break;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report.set_timing(seconds, options.threads);
  return report;
}

}  // namespace

Report execute(const RunConfig& config, const RunOptions& options) {
  fs::create_directories(options.out_dir);
  Artifacts artifacts{options.out_dir, {}};
  return execute_into(config, options, artifacts);
}

int run(const RunConfig& config, const RunOptions& options, std::ostream& err) {
  Artifacts artifacts{options.out_dir, {}};
  bool created = false;
  try {
    created = fs::create_directories(options.out_dir);
    for (const std::string& w : config.warnings()) err << "warning: " << w << '\n';
    Report report = execute_into(config, options, artifacts);
    write_report(artifacts.add("report.json"), report);
    for (const CheckRecord& c : report.checks()) {
      if (!c.pass()) err << "check failed: " << c.name << " (margin " << c.margin << ", tolerance " << c.tolerance << ")\n";
    }
    return report.pass() ? kExitPass : kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    std::error_code ec;
    for (const fs::path& f : artifacts.files) fs::remove(f, ec);
    if (created) fs::remove(options.out_dir, ec);
    return kExitError;
  }
}

}  // namespace dpp
