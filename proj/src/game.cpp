#include "dpp/game.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "dpp/field_io.hpp"
#include "dpp/frame.hpp"
#include "dpp/parallel.hpp"

namespace dpp {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int lattice_index(double t, double dt) {
  const double j = std::round(t / dt);
  if (std::abs(t - j * dt) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw DomainError("greedy strategy: time is off the solver lattice");
  }
  return static_cast<int>(j);
}

}  // namespace

Rng Rng::substream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed;
  const std::uint64_t a = splitmix64(state);
  state ^= index * 0xd1342543de82ef95ULL;
  const std::uint64_t b = splitmix64(state);
  return Rng(a ^ (b + 0x632be59bd9b4e019ULL));
}

Strategy Strategy::fixed_direction(Vec nu) {
  if (std::abs(nu.norm() - 1.0) > 1e-10) throw DomainError("FixedDirection: direction must be a unit vector");
  return Strategy(FixedDirection{std::move(nu)});
}

std::string Strategy::name() const {
  if (std::holds_alternative<FixedDirection>(kind_)) return "fixed_direction";
  if (std::holds_alternative<PullToward>(kind_)) return "pull_toward";
  return std::get<Greedy>(kind_).maximize ? "greedy_max" : "greedy_min";
}

Direction Strategy::direction(const Vec& x, double t) const {
  if (const auto* f = std::get_if<FixedDirection>(&kind_)) return {f->nu, false};
  if (const auto* p = std::get_if<PullToward>(&kind_)) {
    const Vec d = p->target - x;
    const double len = d.norm();
    if (!(len > 1e-14)) return {Vec::Unit(x.size(), 0), true};
    return {d / len, false};
  }
  const auto& g = std::get<Greedy>(kind_);
  const int j = lattice_index(t, g.field->params().time_step());
  if (j < 1) throw DomainError("greedy strategy: point lies below slice 1");
  auto u = [&](const Vec& y) { return g.field->eval_state(y, j - 1); };
  int best = 0;
  double best_value = g.stencil->average(u, x, 0);
  for (int k = 1; k < g.stencil->direction_count(); ++k) {
    const double a = g.stencil->average(u, x, k);
    if (g.maximize ? (a > best_value) : (a < best_value)) {
      best_value = a;
      best = k;
    }
  }
  return {g.stencil->directions()[best], false};
}

Strategy greedy_strategy(std::shared_ptr<const Field> field, std::shared_ptr<const DppStencil> stencil,
                         bool maximize) {
  if (!field || !stencil) throw DomainError("greedy_strategy: null field or stencil");
  if (stencil->dim() != field->dim() || std::abs(stencil->epsilon() - field->params().epsilon()) > 1e-15 ||
      std::abs(stencil->alpha() - field->params().alpha) > 1e-15) {
    throw DomainError("greedy_strategy: stencil does not match the field's parameters");
  }
  return Strategy(Strategy::Greedy{std::move(field), std::move(stencil), maximize});
}

void GameConfig::validate() const {
  if (start.size() != params.dim()) throw DomainError("GameConfig: start dimension mismatch");
  if (classify(start, start_time, params.cylinder) != PointClass::Interior) {
    throw DomainError("GameConfig: start point must be interior");
  }
}

SpaceTimePoint step(const SpaceTimePoint& current, const Strategy& s1, const Strategy& s2, const DppParams& params,
                    Rng& rng, int* fallbacks) {
  const bool first_wins = rng.uniform() < 0.5;
  const Direction dir = (first_wins ? s1 : s2).direction(current.x, current.t);
  if (dir.fallback && fallbacks) ++*fallbacks;
  const double eps = params.epsilon();
  SpaceTimePoint next{current.x, current.t - params.time_step()};
  if (rng.uniform() < params.alpha) {
    next.x += eps * dir.nu;
    return next;
  }
  const int n = params.dim();
  Vec h(n - 1);
  if (n == 2) {
    h[0] = 2.0 * rng.uniform() - 1.0;
  } else if (n == 3) {
    const double r = std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    h << r * std::cos(theta), r * std::sin(theta);
  } else {
    throw DomainError("step: only dimensions 2 and 3 are supported");
  }
  const Frame<double> frame = orthonormal_frame<double>(dir.nu);
  next.x.noalias() += eps * frame.matrix.rightCols(n - 1) * h;
  return next;
}

int step_bound(double start_time, double epsilon) {
  return static_cast<int>(std::ceil(2.0 * start_time / (epsilon * epsilon) - 1e-9)) + 1;
}

GameOutcome play(const GameConfig& config, const Strategy& s1, const Strategy& s2, Rng& rng) {
  config.validate();
  const int bound = step_bound(config.start_time, config.params.epsilon());
  SpaceTimePoint p{config.start, config.start_time};
  GameOutcome out;
  while (classify(p.x, p.t, config.params.cylinder) == PointClass::Interior) {
    p = step(p, s1, s2, config.params, rng, &out.fallbacks);
    ++out.steps;
    if (out.steps > bound) throw std::logic_error("play: termination bound exceeded");
  }
  if (classify(p.x, p.t, config.params.cylinder) != PointClass::ParabolicStrip) {
    throw std::logic_error("play: token left the cylinder without touching the strip");
  }
  out.stop = p.x;
  out.stop_time = p.t;
  out.payoff = config.boundary(p.x, p.t);
  return out;
}

std::vector<GameOutcome> simulate(const GameConfig& config, const Strategy& s1, const Strategy& s2,
                                  std::size_t trials, unsigned threads) {
  if (trials < 1) throw DomainError("simulate: need at least one trial");
  config.validate();
  std::vector<GameOutcome> outcomes(trials);
  parallel_for(trials, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) {
      Rng rng = Rng::substream(config.seed, r);
      outcomes[r] = play(config, s1, s2, rng);
    }
  });
  return outcomes;
}

ValueEstimate summarize(const std::vector<GameOutcome>& outcomes, std::uint64_t seed) {
  if (outcomes.empty()) throw DomainError("summarize: no outcomes");
  // Neumaier summation in trial order: independent of how trials were scheduled.
  auto sum = [&](auto&& term) {
    double s = 0.0, c = 0.0;
    for (const GameOutcome& o : outcomes) {
      const double v = term(o);
      const double t = s + v;
      c += (std::abs(s) >= std::abs(v)) ? (s - t) + v : (v - t) + s;
      s = t;
    }
    return s + c;
  };
  ValueEstimate est;
  est.trials = outcomes.size();
  est.seed = seed;
  const double n = static_cast<double>(outcomes.size());
  est.mean = sum([](const GameOutcome& o) { return o.payoff; }) / n;
  if (outcomes.size() == 1) {
    est.degenerate = true;
  } else {
    const double ss = sum([&](const GameOutcome& o) { return (o.payoff - est.mean) * (o.payoff - est.mean); });
    est.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  for (const GameOutcome& o : outcomes) {
    est.max_steps = std::max(est.max_steps, o.steps);
    est.fallbacks += o.fallbacks;
  }
  return est;
}

ValueEstimate estimate_value(const GameConfig& config, const Strategy& s1, const Strategy& s2, std::size_t trials,
                             unsigned threads) {
  return summarize(simulate(config, s1, s2, trials, threads), config.seed);
}

void write_outcomes_csv(const std::filesystem::path& path, const std::vector<GameOutcome>& outcomes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const int dim = outcomes.empty() ? 0 : static_cast<int>(outcomes.front().stop.size());
  out << "trial,steps,stop_t";
  for (int a = 1; a <= dim; ++a) out << ",stop_x" << a;
  out << ",payoff\n";
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    const GameOutcome& o = outcomes[r];
    out << r << ',' << o.steps << ',' << format_double(o.stop_time);
    for (int a = 0; a < dim; ++a) out << ',' << format_double(o.stop[a]);
    out << ',' << format_double(o.payoff) << '\n';
  }
  if (!out) throw std::runtime_error("outcomes CSV write failed");
}

}  // namespace dpp
