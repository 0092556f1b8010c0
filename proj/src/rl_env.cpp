#include "emberline/rl_env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace emberline {

EnvConfig default_preset() {
  EnvConfig cfg;
  cfg.height = 20;
  cfg.width = 20;
  cfg.window_radius = 2;
  cfg.water_capacity = 30;
  cfg.burn_penalty = 0.05;
  cfg.max_episode_steps = 120;
  cfg.wind_speed = 1.0;
  cfg.wind_direction = 0.0;
  cfg.spread.p_base = 0.06;
  cfg.spread.alpha_w1 = 0.1;
  cfg.spread.alpha_w2 = 0.2;
  cfg.spread.alpha_s = 0.5;
  cfg.spread.alpha_gamma = 1.0;
  cfg.spread.p_continue = 0.9;
  return cfg;
}

EnvConfig smoke10_preset() {
  EnvConfig cfg;
  cfg.height = 10;
  cfg.width = 10;
  cfg.window_radius = 2;
  cfg.water_capacity = 60;
  cfg.burn_penalty = 0.05;
  cfg.max_episode_steps = 100;
  // Three ignitions instead of one: placement luck largely averages out, so
  // per-episode returns are far less noisy, and some fire is usually close
  // enough to enter the 5x5 window early, which is what makes approach
  // behavior learnable at all. Water is generous and only drains on a real
  // douse — conserving water is a credit-assignment problem a smoke trainer
  // cannot solve, so the preset does not pose it.
  cfg.ignition_count = 3;
  cfg.waste_water = false;
  cfg.wind_speed = 0.5;
  cfg.wind_direction = 0.0;
  // Near-persistent, slow-creeping fire: it almost never burns out on its
  // own within an episode, so the return is dominated by what the agent does
  // rather than by ignition luck. That keeps the policy-gradient signal clean.
  cfg.spread.p_base = 0.03;
  cfg.spread.alpha_w1 = 0.1;
  cfg.spread.alpha_w2 = 0.2;
  cfg.spread.alpha_s = 0.5;
  cfg.spread.alpha_gamma = 1.0;
  cfg.spread.p_continue = 0.985;
  return cfg;
}

Action action_from_index(int index) {
  if (index < 0 || index >= kActionCount) {
    throw std::out_of_range("action_from_index: index " + std::to_string(index) +
                            " outside [0, 10)");
  }
  return Action{static_cast<Move>(index / 2), static_cast<Valve>(index % 2)};
}

std::string action_name(Action a) {
  const char* moves[] = {"north", "south", "east", "west", "stay"};
  return std::string(moves[static_cast<int>(a.move)]) +
         (a.valve == Valve::Open ? "+open" : "+closed");
}

int observation_size(const EnvConfig& cfg) {
  const int side = 2 * cfg.window_radius + 1;
  return 3 * side * side + 3;
}

namespace {

void validate_env_config(const EnvConfig& cfg) {
  if (cfg.height < 1 || cfg.width < 1) {
    throw std::invalid_argument("EnvConfig: dimensions must be at least 1x1");
  }
  if (cfg.window_radius < 0) throw std::invalid_argument("EnvConfig: negative window radius");
  if (cfg.water_capacity < 1) throw std::invalid_argument("EnvConfig: water capacity must be >= 1");
  if (!(cfg.burn_penalty > 0.0)) throw std::invalid_argument("EnvConfig: burn penalty must be > 0");
  if (cfg.max_episode_steps < 1) {
    throw std::invalid_argument("EnvConfig: max episode steps must be >= 1");
  }
  if (cfg.ignition_count < 0 || cfg.ignition_count > cfg.height * cfg.width) {
    throw std::invalid_argument("EnvConfig: ignition count outside [0, cells]");
  }
}

EnvConfig validated(EnvConfig cfg) {
  validate_env_config(cfg);
  return cfg;
}

GridState flat_terrain(const EnvConfig& cfg) {
  return GridState(FireLayer(cfg.height, cfg.width, FireState::Unburned),
                   WindField::uniform(cfg.height, cfg.width, cfg.wind_speed, cfg.wind_direction),
                   FuelField::uniform(cfg.height, cfg.width, cfg.fuel_veg, cfg.fuel_den),
                   SlopeField(cfg.height, cfg.width));
}

int count_burning(const FireLayer& fire) {
  int n = 0;
  for (FireState s : fire.data()) n += s == FireState::Burning ? 1 : 0;
  return n;
}

bool any_ever_burned(const FireLayer& fire) {
  for (FireState s : fire.data()) {
    if (s != FireState::Unburned) return true;
  }
  return false;
}

}  // namespace

FireSuppressionEnv::FireSuppressionEnv(EnvConfig cfg)
    : cfg_(validated(std::move(cfg))), terrain_(flat_terrain(cfg_)), tables_(terrain_, cfg_.spread) {}

EnvState FireSuppressionEnv::reset(std::uint64_t seed, std::uint64_t stream) const {
  const RngKey key{seed, 0, stream};
  const auto n = static_cast<std::uint64_t>(cfg_.height * cfg_.width);
  EnvState state;
  state.fire = FireLayer(cfg_.height, cfg_.width, FireState::Unburned);
  std::uint64_t counter = 0;
  for (int placed = 0; placed < cfg_.ignition_count;) {
    const auto cell = static_cast<int>(rng_below(key, counter++, kDrawEnvSetup, n));
    if (state.fire[cell] == FireState::Burning) continue;  // redraw duplicates
    state.fire[cell] = FireState::Burning;
    ++placed;
  }
  const auto agent_cell = static_cast<int>(rng_below(key, counter++, kDrawEnvSetup, n));
  state.agent = CellIndex{agent_cell / cfg_.width, agent_cell % cfg_.width};
  state.water = cfg_.water_capacity;
  state.step = 0;
  state.seed = seed;
  state.stream = stream;
  state.done = count_burning(state.fire) == 0;
  return state;
}

Observation FireSuppressionEnv::observe(const EnvState& state) const {
  const int r = cfg_.window_radius;
  Observation obs;
  obs.values.assign(static_cast<std::size_t>(observation_size(cfg_)), 0.0);
  std::size_t at = 0;
  // Window rows from north (+r) to south (-r), columns west to east.
  for (int dy = r; dy >= -r; --dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const int row = state.agent.row + dy;
      const int col = state.agent.col + dx;
      if (state.fire.in_bounds(row, col)) {
        obs.values[at + static_cast<std::size_t>(state.fire(row, col))] = 1.0;
      }
      at += 3;
    }
  }
  obs.values[at++] = static_cast<double>(state.water) / cfg_.water_capacity;
  obs.values[at++] = cfg_.height > 1
                         ? static_cast<double>(state.agent.row) / (cfg_.height - 1)
                         : 0.0;
  obs.values[at++] = cfg_.width > 1 ? static_cast<double>(state.agent.col) / (cfg_.width - 1)
                                    : 0.0;
  return obs;
}

StepResult FireSuppressionEnv::step(const EnvState& state, Action action) const {
  if (state.done) throw std::logic_error("FireSuppressionEnv::step: episode already finished");

  EnvState next = state;

  // 1) Move, clamped at the boundary.
  switch (action.move) {
    case Move::North: next.agent.row = std::min(next.agent.row + 1, cfg_.height - 1); break;
    case Move::South: next.agent.row = std::max(next.agent.row - 1, 0); break;
    case Move::East: next.agent.col = std::min(next.agent.col + 1, cfg_.width - 1); break;
    case Move::West: next.agent.col = std::max(next.agent.col - 1, 0); break;
    case Move::Stay: break;
  }

  // 2) Water drop on the agent's cell.
  if (action.valve == Valve::Open && next.water > 0) {
    const bool on_fire = next.fire(next.agent.row, next.agent.col) == FireState::Burning;
    if (on_fire) next.fire(next.agent.row, next.agent.col) = FireState::Burned;
    if (on_fire || cfg_.waste_water) next.water -= 1;
  }

  // 3) Fire advances one stochastic step.
  const RngKey key{state.seed, static_cast<std::uint64_t>(state.step), state.stream};
  next.fire = step_stochastic(next.fire, tables_, cfg_.spread, key, Exec::serial);
  next.step = state.step + 1;

  // 4) Reward and termination.
  const int burning = count_burning(next.fire);
  double reward = -cfg_.burn_penalty * burning;
  if (burning == 0 && any_ever_burned(next.fire)) reward += kTerminalBonus;
  next.done = burning == 0 || next.step >= cfg_.max_episode_steps;

  StepResult result;
  result.state = std::move(next);
  result.observation = observe(result.state);
  result.reward = reward;
  result.done = result.state.done;
  return result;
}

Action heuristic_policy(const EnvState& state) {
  int best_dist = -1;
  CellIndex target{0, 0};
  const int h = state.fire.height();
  const int w = state.fire.width();
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      if (state.fire(row, col) != FireState::Burning) continue;
      const int dist = std::abs(row - state.agent.row) + std::abs(col - state.agent.col);
      if (best_dist < 0 || dist < best_dist) {
        best_dist = dist;
        target = CellIndex{row, col};
      }
    }
  }
  if (best_dist < 0) return Action{Move::Stay, Valve::Closed};
  if (best_dist == 0) {
    return Action{Move::Stay, state.water > 0 ? Valve::Open : Valve::Closed};
  }
  const int dr = target.row - state.agent.row;
  const int dc = target.col - state.agent.col;
  if (std::abs(dr) >= std::abs(dc) && dr != 0) {
    return Action{dr > 0 ? Move::North : Move::South, Valve::Closed};
  }
  return Action{dc > 0 ? Move::East : Move::West, Valve::Closed};
}

Action random_policy(const RngKey& key) {
  return action_from_index(static_cast<int>(rng_below(key, 0, kDrawPolicy, kActionCount)));
}

EpisodeResult run_episode(const FireSuppressionEnv& env, const PolicyFn& policy,
                          std::uint64_t seed, std::uint64_t stream,
                          std::vector<EnvState>* trace) {
  EnvState state = env.reset(seed, stream);
  Observation obs = env.observe(state);
  if (trace != nullptr) trace->push_back(state);
  EpisodeResult result;
  while (!state.done) {
    const Action action = policy(env, state, obs);
    StepResult sr = env.step(state, action);
    result.total_return += sr.reward;
    state = std::move(sr.state);
    obs = std::move(sr.observation);
    if (trace != nullptr) trace->push_back(state);
  }
  result.steps = state.step;
  result.success = count_burning(state.fire) == 0 && any_ever_burned(state.fire);
  return result;
}

EpisodeStats run_batch_episodes(const FireSuppressionEnv& env, const PolicyFn& policy, int n,
                                std::uint64_t seed, std::uint64_t first_stream) {
  if (n < 1) throw std::invalid_argument("run_batch_episodes: n must be >= 1");
  EpisodeStats stats;
  stats.returns.reserve(static_cast<std::size_t>(n));
  double sum = 0.0;
  double steps = 0.0;
  int successes = 0;
  for (int j = 0; j < n; ++j) {
    const EpisodeResult r = run_episode(env, policy, seed, first_stream + static_cast<std::uint64_t>(j));
    stats.returns.push_back(r.total_return);
    sum += r.total_return;
    steps += r.steps;
    successes += r.success ? 1 : 0;
  }
  stats.mean_return = sum / n;
  double var = 0.0;
  for (double g : stats.returns) var += (g - stats.mean_return) * (g - stats.mean_return);
  stats.std_return = std::sqrt(var / n);
  stats.success_rate = static_cast<double>(successes) / n;
  stats.mean_steps = steps / n;
  return stats;
}

}  // namespace emberline
