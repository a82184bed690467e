#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <variant>
#include <vector>

#include "dpp/boundary.hpp"
#include "dpp/rng.hpp"
#include "dpp/field.hpp"
#include "dpp/params.hpp"

namespace dpp {

struct Direction {
  Vec nu;
  /// Set when the strategy had no well-defined choice and fell back to e1.
  bool fallback = false;
};

/// Markov strategy: maps the current space-time point to a unit vector.
class Strategy {
 public:
  struct FixedDirection {
    Vec nu;
  };
  struct PullToward {
    Vec target;
  };
  struct Greedy {
    std::shared_ptr<const Field> field;
    std::shared_ptr<const DppStencil> stencil;
    bool maximize;
  };

  static Strategy fixed_direction(Vec nu);
  static Strategy pull_toward(Vec target) { return Strategy(PullToward{std::move(target)}); }

  Direction direction(const Vec& x, double t) const;
  std::string name() const;

 private:
  friend Strategy greedy_strategy(std::shared_ptr<const Field>, std::shared_ptr<const DppStencil>, bool);
  explicit Strategy(std::variant<FixedDirection, PullToward, Greedy> kind) : kind_(std::move(kind)) {}
  std::variant<FixedDirection, PullToward, Greedy> kind_;
};

enum class GreedyMode { Max, Min };

/// Picks the stencil direction with the largest (Max) or smallest (Min)
/// averaging operator on the previous slice; lowest index wins ties. Only
/// valid at lattice times t_j with j >= 1.
Strategy greedy_strategy(std::shared_ptr<const Field> field, std::shared_ptr<const DppStencil> stencil,
                         bool maximize);
inline Strategy greedy_strategy(std::shared_ptr<const Field> field, std::shared_ptr<const DppStencil> stencil,
                                GreedyMode mode) {
  return greedy_strategy(std::move(field), std::move(stencil), mode == GreedyMode::Max);
}

struct GameConfig {
  DppParams params;
  BoundaryData boundary;
  Vec start;
  double start_time;
  std::uint64_t seed;

  /// Throws unless the start point is interior.
  void validate() const;
};

struct SpaceTimePoint {
  Vec x;
  double t;
};

struct GameOutcome {
  Vec stop;
  double stop_time = 0.0;
  double payoff = 0.0;
  int steps = 0;
  /// Rounds in which a strategy fell back to e1.
  int fallbacks = 0;
};

struct ValueEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  /// A single trial gives no spread; std_error is then reported as 0.
  bool degenerate = false;
  int max_steps = 0;
  long fallbacks = 0;
};

/// One round: fair coin picks the mover, then with probability alpha a pull
/// step x + eps nu, otherwise a uniform point of the eps-ball orthogonal to nu.
SpaceTimePoint step(const SpaceTimePoint& current, const Strategy& s1, const Strategy& s2, const DppParams& params,
                    Rng& rng, int* fallbacks = nullptr);

/// Plays until the token first lands in the parabolic strip.
GameOutcome play(const GameConfig& config, const Strategy& s1, const Strategy& s2, Rng& rng);

/// ceil(2 t0 / eps^2) + 1.
int step_bound(double start_time, double epsilon);

/// All trajectories, trajectory r using Rng::substream(config.seed, r).
std::vector<GameOutcome> simulate(const GameConfig& config, const Strategy& s1, const Strategy& s2,
                                  std::size_t trials, unsigned threads = 1);

ValueEstimate summarize(const std::vector<GameOutcome>& outcomes, std::uint64_t seed);

ValueEstimate estimate_value(const GameConfig& config, const Strategy& s1, const Strategy& s2, std::size_t trials,
                             unsigned threads = 1);

/// CSV `trial,steps,stop_t,stop_x1..xn,payoff`.
void write_outcomes_csv(const std::filesystem::path& path, const std::vector<GameOutcome>& outcomes);

}  // namespace dpp
