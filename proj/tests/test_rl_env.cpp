#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "emberline/reinforce.hpp"
#include "emberline/rl_env.hpp"

using namespace emberline;

namespace {

// Terrain with dead fuel everywhere: ignition probability is exactly zero, and
// with p_continue = 1 burning cells burn forever. Lets tests script exact
// fire configurations.
EnvConfig frozen_fire_config(int h = 6, int w = 6) {
  EnvConfig cfg;
  cfg.height = h;
  cfg.width = w;
  cfg.window_radius = 2;
  cfg.water_capacity = 4;
  cfg.burn_penalty = 0.05;
  cfg.max_episode_steps = 50;
  cfg.fuel_veg = -1.0;  // no cell can ignite
  cfg.spread.p_continue = 1.0;
  return cfg;
}

EnvState scripted_state(const EnvConfig& cfg, const std::vector<CellIndex>& burning,
                        CellIndex agent, int water) {
  EnvState s;
  s.fire = FireLayer(cfg.height, cfg.width, FireState::Unburned);
  for (const CellIndex& c : burning) s.fire(c.row, c.col) = FireState::Burning;
  s.agent = agent;
  s.water = water;
  s.step = 0;
  s.seed = 1;
  s.stream = 0;
  s.done = false;
  return s;
}

int count_burning(const FireLayer& fire) {
  int n = 0;
  for (FireState s : fire.data()) n += s == FireState::Burning ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("action index round-trip and names") {
  for (int i = 0; i < kActionCount; ++i) {
    const Action a = action_from_index(i);
    CHECK(action_index(a) == i);
  }
  CHECK_THROWS_AS(action_from_index(kActionCount), std::out_of_range);
  CHECK_THROWS_AS(action_from_index(-1), std::out_of_range);
  CHECK(action_name(Action{Move::Stay, Valve::Open}) == "stay+open");
  CHECK(action_name(Action{Move::West, Valve::Closed}) == "west+closed");
}

TEST_CASE("env config validation") {
  CHECK_NOTHROW(FireSuppressionEnv{default_preset()});
  EnvConfig bad = default_preset();
  bad.water_capacity = 0;
  CHECK_THROWS_AS(FireSuppressionEnv{bad}, std::invalid_argument);
  bad = default_preset();
  bad.height = 0;
  CHECK_THROWS_AS(FireSuppressionEnv{bad}, std::invalid_argument);
  bad = default_preset();
  bad.burn_penalty = 0.0;
  CHECK_THROWS_AS(FireSuppressionEnv{bad}, std::invalid_argument);
  bad = default_preset();
  bad.max_episode_steps = 0;
  CHECK_THROWS_AS(FireSuppressionEnv{bad}, std::invalid_argument);
  bad = default_preset();
  bad.ignition_count = bad.height * bad.width + 1;
  CHECK_THROWS_AS(FireSuppressionEnv{bad}, std::invalid_argument);
}

TEST_CASE("reset: determinism, single ignition, full water") {
  const FireSuppressionEnv env(default_preset());
  const EnvState a = env.reset(42, 0);
  const EnvState b = env.reset(42, 0);
  CHECK(a.fire == b.fire);
  CHECK(a.agent.row == b.agent.row);
  CHECK(a.agent.col == b.agent.col);

  CHECK(count_burning(a.fire) == 1);
  CHECK(a.water == env.config().water_capacity);
  CHECK(a.step == 0);
  CHECK_FALSE(a.done);
  CHECK(a.fire.in_bounds(a.agent.row, a.agent.col));

  // different stream -> independent layout (compare a handful)
  bool any_differ = false;
  for (std::uint64_t s = 1; s <= 8 && !any_differ; ++s) {
    const EnvState c = env.reset(42, s);
    any_differ = !(c.fire == a.fire) || c.agent.row != a.agent.row || c.agent.col != a.agent.col;
  }
  CHECK(any_differ);

  // multi-ignition config places the requested count
  EnvConfig multi = default_preset();
  multi.ignition_count = 7;
  const FireSuppressionEnv env7(multi);
  CHECK(count_burning(env7.reset(3, 0).fire) == 7);
}

TEST_CASE("observation layout and scalars") {
  const EnvConfig cfg = frozen_fire_config(6, 6);
  const FireSuppressionEnv env(cfg);
  CHECK(observation_size(cfg) == 3 * 5 * 5 + 3);

  // agent at the SW corner: only the 3x3 quadrant with dy,dx >= 0 is in bounds
  const EnvState corner = scripted_state(cfg, {CellIndex{0, 0}}, CellIndex{0, 0}, 4);
  const Observation obs = env.observe(corner);
  REQUIRE(static_cast<int>(obs.values.size()) == observation_size(cfg));
  const int r = cfg.window_radius;
  const int side = 2 * r + 1;
  double hot_total = 0.0;
  for (int k = 0; k < side * side; ++k) {
    const int dy = r - k / side;  // rows emitted north to south
    const int dx = k % side - r;
    double triple = 0.0;
    for (int ch = 0; ch < 3; ++ch) triple += obs.values[static_cast<std::size_t>(3 * k + ch)];
    const bool in_bounds = corner.fire.in_bounds(corner.agent.row + dy, corner.agent.col + dx);
    CHECK(triple == (in_bounds ? 1.0 : 0.0));
    hot_total += triple;
  }
  CHECK(hot_total == 9.0);
  // the burning channel is hot exactly at the agent's own cell (center of window)
  const int center = (r * side + r) * 3;
  CHECK(obs.values[static_cast<std::size_t>(center + 1)] == 1.0);

  // scalars: water fraction, normalized row and column
  const std::size_t n = obs.values.size();
  CHECK(obs.values[n - 3] == 1.0);
  CHECK(obs.values[n - 2] == 0.0);
  CHECK(obs.values[n - 1] == 0.0);

  const EnvState mid = scripted_state(cfg, {CellIndex{0, 0}}, CellIndex{5, 2}, 1);
  const Observation obs2 = env.observe(mid);
  CHECK(obs2.values[n - 3] == 0.25);
  CHECK(obs2.values[n - 2] == 1.0);  // row 5 of 0..5
  CHECK(obs2.values[n - 1] == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("step: movement clamped at boundaries") {
  const EnvConfig cfg = frozen_fire_config();
  const FireSuppressionEnv env(cfg);
  const EnvState at_origin = scripted_state(cfg, {CellIndex{5, 5}}, CellIndex{1, 0}, 4);

  StepResult r = env.step(at_origin, Action{Move::West, Valve::Closed});
  CHECK(r.state.agent.row == 1);
  CHECK(r.state.agent.col == 0);  // clamped

  r = env.step(at_origin, Action{Move::South, Valve::Closed});
  CHECK(r.state.agent.row == 0);
  r = env.step(r.state, Action{Move::South, Valve::Closed});
  CHECK(r.state.agent.row == 0);  // clamped at the bottom row

  const EnvState at_top = scripted_state(cfg, {CellIndex{0, 0}}, CellIndex{5, 5}, 4);
  r = env.step(at_top, Action{Move::North, Valve::Closed});
  CHECK(r.state.agent.row == 5);  // clamped
  r = env.step(at_top, Action{Move::East, Valve::Closed});
  CHECK(r.state.agent.col == 5);  // clamped
  r = env.step(at_top, Action{Move::Stay, Valve::Closed});
  CHECK(r.state.agent.row == 5);
  CHECK(r.state.agent.col == 5);
}

TEST_CASE("step: reward is -penalty * burning count") {
  const EnvConfig cfg = frozen_fire_config(8, 8);
  const FireSuppressionEnv env(cfg);
  const std::vector<CellIndex> five = {{0, 0}, {1, 3}, {2, 5}, {4, 4}, {7, 7}};
  const EnvState s = scripted_state(cfg, five, CellIndex{6, 0}, 4);
  const StepResult r = env.step(s, Action{Move::Stay, Valve::Closed});
  CHECK(count_burning(r.state.fire) == 5);
  CHECK(r.reward == -cfg.burn_penalty * 5.0);
  CHECK(r.reward == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK_FALSE(r.done);
  CHECK(r.state.step == 1);
}

TEST_CASE("step: water drop, terminal bonus, waste semantics") {
  const EnvConfig cfg = frozen_fire_config();
  const FireSuppressionEnv env(cfg);

  // agent on the lone burning cell, valve open: extinguish, +10, done
  {
    const EnvState s = scripted_state(cfg, {CellIndex{2, 2}}, CellIndex{2, 2}, 4);
    const StepResult r = env.step(s, Action{Move::Stay, Valve::Open});
    CHECK(r.state.fire(2, 2) == FireState::Burned);
    CHECK(r.state.water == 3);
    CHECK(r.reward == 10.0);
    CHECK(r.done);
    CHECK(r.state.done);
    CHECK_THROWS_AS(env.step(r.state, Action{Move::Stay, Valve::Closed}), std::logic_error);
  }
  // valve open with no water left: nothing extinguished
  {
    const EnvState s = scripted_state(cfg, {CellIndex{2, 2}}, CellIndex{2, 2}, 0);
    const StepResult r = env.step(s, Action{Move::Stay, Valve::Open});
    CHECK(r.state.fire(2, 2) == FireState::Burning);
    CHECK(r.state.water == 0);
    CHECK_FALSE(r.done);
  }
  // valve open over an unburned cell: water is wasted by default
  {
    const EnvState s = scripted_state(cfg, {CellIndex{5, 5}}, CellIndex{1, 1}, 4);
    const StepResult r = env.step(s, Action{Move::Stay, Valve::Open});
    CHECK(r.state.water == 3);
    CHECK(r.state.fire(1, 1) == FireState::Unburned);
  }
  // ... unless the no-waste variant is configured
  {
    EnvConfig thrifty = cfg;
    thrifty.waste_water = false;
    const FireSuppressionEnv env2(thrifty);
    const EnvState s = scripted_state(thrifty, {CellIndex{5, 5}}, CellIndex{1, 1}, 4);
    const StepResult r = env2.step(s, Action{Move::Stay, Valve::Open});
    CHECK(r.state.water == 4);
  }
  // drop happens after the move: stepping onto the fire extinguishes it
  {
    const EnvState s = scripted_state(cfg, {CellIndex{2, 3}}, CellIndex{2, 2}, 4);
    const StepResult r = env.step(s, Action{Move::East, Valve::Open});
    CHECK(r.state.fire(2, 3) == FireState::Burned);
    CHECK(r.reward == 10.0);
  }
}

TEST_CASE("valve held closed reproduces bare stochastic stepping bitwise") {
  const FireSuppressionEnv env(default_preset());
  const std::uint64_t seed = 7;
  const std::uint64_t stream = 3;
  EnvState state = env.reset(seed, stream);

  const int horizon = 40;
  const StochasticRun solo = run_stochastic(state.fire, env.terrain(), env.config().spread,
                                            RngKey{seed, 0, stream}, horizon, true);
  REQUIRE(static_cast<int>(solo.trajectory.size()) == horizon + 1);

  int t = 0;
  while (!state.done && t < horizon) {
    const StepResult r = env.step(state, Action{Move::Stay, Valve::Closed});
    state = r.state;
    ++t;
    REQUIRE(state.fire == solo.trajectory[static_cast<std::size_t>(t)]);
  }
  CHECK(t > 0);
}

TEST_CASE("heuristic policy worked cases") {
  const EnvConfig cfg = frozen_fire_config(8, 8);

  // on a burning cell with water -> stay and open
  {
    const EnvState s = scripted_state(cfg, {CellIndex{3, 3}}, CellIndex{3, 3}, 2);
    CHECK(heuristic_policy(s) == Action{Move::Stay, Valve::Open});
  }
  // on a burning cell without water -> stay, valve closed
  {
    const EnvState s = scripted_state(cfg, {CellIndex{3, 3}}, CellIndex{3, 3}, 0);
    CHECK(heuristic_policy(s) == Action{Move::Stay, Valve::Closed});
  }
  // nearest fire strictly east -> move east, valve closed
  {
    const EnvState s = scripted_state(cfg, {CellIndex{2, 6}}, CellIndex{2, 1}, 2);
    CHECK(heuristic_policy(s) == Action{Move::East, Valve::Closed});
  }
  // fire to the north and a farther one west -> approach the nearest
  {
    const EnvState s = scripted_state(cfg, {CellIndex{6, 2}, CellIndex{1, 7}}, CellIndex{2, 2}, 2);
    CHECK(heuristic_policy(s) == Action{Move::North, Valve::Closed});
  }
  // no burning cells -> stay, closed
  {
    EnvState s = scripted_state(cfg, {}, CellIndex{4, 4}, 2);
    s.fire(0, 0) = FireState::Burned;
    CHECK(heuristic_policy(s) == Action{Move::Stay, Valve::Closed});
  }
}

TEST_CASE("random policy: determinism and uniformity") {
  const RngKey key{5, 17, 2};
  CHECK(random_policy(key) == random_policy(key));

  int counts[kActionCount] = {};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Action a = random_policy(RngKey{9, static_cast<std::uint64_t>(i), 0});
    const int idx = action_index(a);
    REQUIRE(idx >= 0);
    REQUIRE(idx < kActionCount);
    ++counts[idx];
  }
  const double expect = n / static_cast<double>(kActionCount);
  const double sigma = std::sqrt(n * 0.1 * 0.9);
  for (int i = 0; i < kActionCount; ++i) {
    CHECK(std::abs(counts[i] - expect) < 4.0 * sigma);
  }
}

TEST_CASE("episode invariants: water, rewards, termination, one-hot") {
  const FireSuppressionEnv env(default_preset());
  const EnvConfig& cfg = env.config();
  const double reward_floor = -cfg.burn_penalty * cfg.height * cfg.width;
  const int side = 2 * cfg.window_radius + 1;

  for (std::uint64_t stream = 0; stream < 4; ++stream) {
    EnvState state = env.reset(100, stream);
    int prev_water = state.water;
    int positive_rewards = 0;
    while (!state.done) {
      const Action a = random_policy(RngKey{100, static_cast<std::uint64_t>(state.step), stream});
      const StepResult r = env.step(state, a);
      CHECK(r.state.water <= prev_water);
      CHECK(r.state.water >= 0);
      CHECK(r.reward >= reward_floor);
      if (r.reward > 0.0) {
        ++positive_rewards;
        CHECK(r.done);  // only the terminal bonus is positive
      }
      // every in-bounds window cell one-hot, out-of-bounds all-zero
      for (int k = 0; k < side * side; ++k) {
        double triple = 0.0;
        for (int ch = 0; ch < 3; ++ch) {
          const double v = r.observation.values[static_cast<std::size_t>(3 * k + ch)];
          CHECK((v == 0.0 || v == 1.0));
          triple += v;
        }
        CHECK(triple <= 1.0);
      }
      prev_water = r.state.water;
      state = r.state;
    }
    CHECK(state.step <= cfg.max_episode_steps);
    CHECK(positive_rewards <= 1);
  }
}

TEST_CASE("run_episode and run_batch_episodes") {
  const FireSuppressionEnv env(default_preset());
  const PolicyFn heuristic = [](const FireSuppressionEnv&, const EnvState& s, const Observation&) {
    return heuristic_policy(s);
  };
  const PolicyFn random = [](const FireSuppressionEnv&, const EnvState& s, const Observation&) {
    return random_policy(RngKey{s.seed, static_cast<std::uint64_t>(s.step), s.stream});
  };

  // trace covers the whole episode, starting with the reset state
  std::vector<EnvState> trace;
  const EpisodeResult one = run_episode(env, heuristic, 5, 0, &trace);
  REQUIRE(static_cast<int>(trace.size()) == one.steps + 1);
  CHECK(trace.front().step == 0);
  CHECK(trace.back().done);
  CHECK(one.steps <= env.config().max_episode_steps);

  // N=1: mean equals that episode's return, std 0
  const EpisodeStats single = run_batch_episodes(env, heuristic, 1, 5, 0);
  CHECK(single.mean_return == one.total_return);
  CHECK(single.std_return == 0.0);
  CHECK(single.returns.size() == 1);
  CHECK_THROWS_AS(run_batch_episodes(env, heuristic, 0, 5, 0), std::invalid_argument);

  // determinism
  const EpisodeStats a = run_batch_episodes(env, random, 12, 21, 0);
  const EpisodeStats b = run_batch_episodes(env, random, 12, 21, 0);
  REQUIRE(a.returns.size() == b.returns.size());
  for (std::size_t i = 0; i < a.returns.size(); ++i) CHECK(a.returns[i] == b.returns[i]);
  CHECK(a.mean_return == b.mean_return);
  CHECK(a.success_rate == b.success_rate);

  // the scripted baseline beats random play and solves most episodes
  const EpisodeStats h = run_batch_episodes(env, heuristic, 100, 11, 0);
  const EpisodeStats r = run_batch_episodes(env, random, 100, 11, 0);
  CHECK(h.mean_return > r.mean_return);
  CHECK(h.success_rate >= 0.5);
}

TEST_CASE("softmax policy basics") {
  const EnvConfig cfg = smoke10_preset();
  const int dim = observation_size(cfg);
  const SoftmaxPolicy policy(dim);
  Observation obs;
  obs.values.assign(static_cast<std::size_t>(dim), 0.3);
  const std::vector<double> p = policy.action_probabilities(obs);
  REQUIRE(static_cast<int>(p.size()) == kActionCount);
  for (double v : p) CHECK(v == 0.1);  // zero weights -> uniform

  const RngKey key{4, 9, 1};
  CHECK(policy.act(obs, key) == policy.act(obs, key));

  // a large bias makes both greedy and sampling pick that action
  SoftmaxPolicy biased(dim);
  biased.bias()[3] = 50.0;
  CHECK(action_index(biased.greedy(obs)) == 3);
  CHECK(action_index(biased.act(obs, key)) == 3);
}

TEST_CASE("train_reinforce: history contract and determinism") {
  const FireSuppressionEnv env(smoke10_preset());
  const SoftmaxPolicy init(observation_size(env.config()));

  ReinforceOptions opts;
  opts.episodes = 0;
  const ReinforceResult untouched = train_reinforce(env, init, opts);
  CHECK(untouched.returns.empty());
  for (double w : untouched.policy.weights()) CHECK(w == 0.0);

  opts.episodes = 5;
  const ReinforceResult a = train_reinforce(env, init, opts);
  const ReinforceResult b = train_reinforce(env, init, opts);
  REQUIRE(a.returns.size() == 5);
  REQUIRE(b.returns.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(a.returns[i] == b.returns[i]);
  REQUIRE(a.policy.weights().size() == b.policy.weights().size());
  for (std::size_t i = 0; i < a.policy.weights().size(); ++i) {
    CHECK(a.policy.weights()[i] == b.policy.weights()[i]);
  }
  // training actually moved the parameters
  bool moved = false;
  for (double w : a.policy.weights()) moved = moved || w != 0.0;
  CHECK(moved);
}
