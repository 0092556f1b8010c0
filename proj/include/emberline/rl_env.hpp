// Fire-suppression environment: an air tanker with a partial egocentric view
// moves over a burning stochastic grid and opens a water valve to turn
// burning cells into burned ones. Includes scripted baselines and batched
// episode evaluation; the REINFORCE trainer lives in reinforce.hpp.
//
// Step contract (fixed order): 1) move, clamped at the boundary; 2) water
// drop on the agent's cell; 3) one stochastic fire step; 4) reward
// -burn_penalty * (burning cells), plus the +10 terminal bonus when the fire
// is out and at least one cell ever burned.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "emberline/engine.hpp"
#include "emberline/grid.hpp"
#include "emberline/rng.hpp"

namespace emberline {

struct EnvConfig {
  int height = 20;
  int width = 20;
  int window_radius = 2;      // egocentric window is (2r+1) x (2r+1)
  int water_capacity = 30;    // cells extinguishable per episode
  double burn_penalty = 0.05; // per burning cell per step
  int max_episode_steps = 120;
  int ignition_count = 1;
  // Water is consumed whenever the valve is open; set false to spend it only
  // when the drop actually extinguishes a burning cell.
  bool waste_water = true;
  double wind_speed = 1.0;
  double wind_direction = 0.0;
  double fuel_veg = 0.0;  // uniform fuel modifiers of the flat terrain
  double fuel_den = 0.0;
  SimConfig spread;
};

inline constexpr double kTerminalBonus = 10.0;

// Tuned so the heuristic baseline extinguishes the fire in at least half of
// its episodes.
EnvConfig default_preset();
// 10x10 slow-spread setup for the policy-gradient smoke test.
EnvConfig smoke10_preset();

enum class Move : int { North = 0, South = 1, East = 2, West = 3, Stay = 4 };
enum class Valve : int { Closed = 0, Open = 1 };

struct Action {
  Move move = Move::Stay;
  Valve valve = Valve::Closed;
  bool operator==(const Action&) const = default;
};

inline constexpr int kActionCount = 10;

inline int action_index(Action a) {
  return static_cast<int>(a.move) * 2 + static_cast<int>(a.valve);
}
Action action_from_index(int index);
std::string action_name(Action a);

struct EnvState {
  FireLayer fire;
  CellIndex agent;
  int water = 0;
  int step = 0;
  std::uint64_t seed = 0;    // episode RNG identity
  std::uint64_t stream = 0;
  bool done = false;
};

// Flattened observation: (2r+1)^2 one-hot fire triples (row-major over the
// window, out-of-bounds cells all-zero), then water / capacity, then the
// agent's normalized row and column.
struct Observation {
  std::vector<double> values;
};

int observation_size(const EnvConfig& cfg);

struct StepResult {
  EnvState state;
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

class FireSuppressionEnv {
 public:
  explicit FireSuppressionEnv(EnvConfig cfg);

  const EnvConfig& config() const { return cfg_; }
  const GridState& terrain() const { return terrain_; }

  // Uniform-random ignition cells and agent start, full water, step 0.
  EnvState reset(std::uint64_t seed, std::uint64_t stream) const;
  Observation observe(const EnvState& state) const;
  // Throws std::logic_error when called on a finished episode.
  StepResult step(const EnvState& state, Action action) const;

 private:
  EnvConfig cfg_;
  GridState terrain_;
  SpreadTables<double> tables_;
};

// Scripted baseline with privileged full-state access: walks the shortest
// path to the nearest burning cell, opens the valve only while standing on
// one with water left.
Action heuristic_policy(const EnvState& state);

// Uniform over the 10 actions, pure function of the episode key and step.
Action random_policy(const RngKey& key);

using PolicyFn =
    std::function<Action(const FireSuppressionEnv& env, const EnvState& state, const Observation& obs)>;

struct EpisodeResult {
  double total_return = 0.0;
  int steps = 0;
  bool success = false;  // terminal bonus achieved
};

EpisodeResult run_episode(const FireSuppressionEnv& env, const PolicyFn& policy,
                          std::uint64_t seed, std::uint64_t stream,
                          std::vector<EnvState>* trace = nullptr);

struct EpisodeStats {
  double mean_return = 0.0;
  double std_return = 0.0;
  double success_rate = 0.0;
  double mean_steps = 0.0;
  std::vector<double> returns;
};

// N independent episodes on streams first_stream .. first_stream + N - 1.
EpisodeStats run_batch_episodes(const FireSuppressionEnv& env, const PolicyFn& policy, int n,
                                std::uint64_t seed, std::uint64_t first_stream = 0);

}  // namespace emberline
