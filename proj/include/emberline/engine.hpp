// Time stepping: stochastic Bernoulli updates over discrete fire layers,
// deterministic raw-probability updates over continuous states, wind
// schedules, and lockstep batched execution.
//
// All step paths (one-shot, run loops, batches, serial, OpenMP-parallel, and
// the dual-number calibration path) evaluate the spread kernel through the
// same canonical expressions, so results are bitwise independent of the
// execution strategy. See kernel.hpp for the association contract.
#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "emberline/dual.hpp"
#include "emberline/grid.hpp"
#include "emberline/kernel.hpp"
#include "emberline/rng.hpp"

namespace emberline {

enum class Exec { serial, parallel };

// Per-cell probability triple (unburned / burning / burned-out). Generic over
// the scalar so calibration can roll it out with derivative-carrying values.
template <class S>
struct BasicContinuousState {
  Grid<S> p_un;
  Grid<S> p_burn;
  Grid<S> p_bd;

  int height() const { return p_un.height(); }
  int width() const { return p_un.width(); }
};

using ContinuousState = BasicContinuousState<double>;

// 0/1-valued continuous state matching a discrete fire layer.
ContinuousState state_from_fire(const FireLayer& fire);

// Checks the per-cell simplex invariant (components nonnegative, sum within
// tol of 1); throws std::invalid_argument on violation.
void validate_state(const ContinuousState& state, double tol = 1e-9);

template <std::size_t N>
BasicContinuousState<Dual<N>> lift_state(const ContinuousState& s) {
  const int h = s.height();
  const int w = s.width();
  BasicContinuousState<Dual<N>> out{Grid<Dual<N>>(h, w), Grid<Dual<N>>(h, w), Grid<Dual<N>>(h, w)};
  for (int i = 0; i < h * w; ++i) {
    out.p_un[i] = lift_constant<N>(s.p_un[i]);
    out.p_burn[i] = lift_constant<N>(s.p_burn[i]);
    out.p_bd[i] = lift_constant<N>(s.p_bd[i]);
  }
  return out;
}

template <std::size_t N>
ContinuousState value_state(const BasicContinuousState<Dual<N>>& s) {
  const int h = s.height();
  const int w = s.width();
  ContinuousState out{Grid<double>(h, w), Grid<double>(h, w), Grid<double>(h, w)};
  for (int i = 0; i < h * w; ++i) {
    out.p_un[i] = s.p_un[i].value;
    out.p_burn[i] = s.p_burn[i].value;
    out.p_bd[i] = s.p_bd[i].value;
  }
  return out;
}

// Precomputed spread factors for one (grid, config) pair. The fuel and slope
// products are wind-independent and built once; the full potential table is
// rebuilt whenever the wind changes. Every entry is produced by the exact
// kernel expressions, so using the table is semantically invisible.
template <class S>
class SpreadTables {
 public:
  SpreadTables(const GridState& grid, const BasicSimConfig<S>& cfg) : h_(grid.height()), w_(grid.width()) {
    const int n = h_ * w_;
    source_.resize(n);
    gamma_.resize(n);
    slope_factor_.resize(static_cast<std::size_t>(n) * 8);
    pot_.resize(static_cast<std::size_t>(n) * 8);
    for (int i = 0; i < n; ++i) {
      const int r = i / w_;
      const int c = i % w_;
      source_[i] = (cfg.p_base * (1.0 + grid.fuel().veg(r, c))) * (1.0 + grid.fuel().den(r, c));
      gamma_[i] = (cfg.alpha_gamma * (1.0 + grid.fuel().veg(r, c))) * (1.0 + grid.fuel().den(r, c));
      for (int k = 0; k < 8; ++k) {
        slope_factor_[static_cast<std::size_t>(i) * 8 + k] = kappa_slope(grid.slope().toward(r, c, k), cfg);
      }
    }
    set_wind(grid.wind(), cfg);
  }

  // Rebuilds the potential table for a new wind field (dims must match).
  void set_wind(const WindField& wind, const BasicSimConfig<S>& cfg) {
    for (int i = 0; i < h_ * w_; ++i) {
      const int r = i / w_;
      const int c = i % w_;
      const double speed = wind.speed(r, c);
      const double direction = wind.direction(r, c);
      for (int k = 0; k < 8; ++k) {
        const S kw = kappa_wind(speed, direction, kNeighborOffsets[k], cfg);
        pot_[static_cast<std::size_t>(i) * 8 + k] =
            (source_[i] * kw) * slope_factor_[static_cast<std::size_t>(i) * 8 + k];
      }
    }
  }

  int height() const { return h_; }
  int width() const { return w_; }
  // phi(u, kNeighborOffsets[k]) for source cell index u.
  const S& pot(int cell, int k) const { return pot_[static_cast<std::size_t>(cell) * 8 + k]; }
  const S& gamma(int cell) const { return gamma_[cell]; }

 private:
  int h_ = 0;
  int w_ = 0;
  std::vector<S> source_;
  std::vector<S> gamma_;
  std::vector<S> slope_factor_;
  std::vector<S> pot_;
};

// Arrival intensity of cell (row, col) from the potential table; mirrors
// kernel.hpp's arrival_intensity fold exactly (k order, zero-weight skip,
// product association).
template <class S, class WeightFn>
S table_intensity(int row, int col, WeightFn&& burning_weight, const SpreadTables<S>& tables) {
  S lambda{0.0};
  for (int k = 0; k < 8; ++k) {
    const NeighborOffset d = kNeighborOffsets[k];
    const int ur = row - d.dy;
    const int uc = col - d.dx;
    if (ur < 0 || ur >= tables.height() || uc < 0 || uc >= tables.width()) continue;
    const auto w = burning_weight(ur, uc);
    if (value_of(w) == 0.0) continue;
    lambda += w * tables.pot(ur * tables.width() + uc, k);
  }
  return lambda;
}

// One deterministic step (raw-probabilities update) from `in` into `out`
// using prebuilt tables. in and out must be distinct states of equal dims.
template <class S>
void step_deterministic_into(const BasicContinuousState<S>& in, BasicContinuousState<S>& out,
                             const SpreadTables<S>& tables, const BasicSimConfig<S>& cfg,
                             Exec exec = Exec::parallel) {
  using std::exp;
  const int w = in.width();
  const int n = in.height() * w;
  const auto cell = [&](int i) {
    const int r = i / w;
    const int c = i % w;
    const S lambda =
        table_intensity(r, c, [&](int rr, int cc) { return in.p_burn(rr, cc); }, tables);
    const S p_ig = 1.0 - exp(-(tables.gamma(i) * lambda));
    const S un = in.p_un[i];
    const S burn = in.p_burn[i];
    const S newly = un * p_ig;
    const S continuing = burn * cfg.p_continue;
    const S burned_now = burn * (1.0 - cfg.p_continue);
    out.p_burn[i] = newly + continuing;
    out.p_un[i] = un - newly;
    out.p_bd[i] = in.p_bd[i] + burned_now;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) cell(i);
  } else {
    for (int i = 0; i < n; ++i) cell(i);
  }
}

// One-shot deterministic step; builds tables internally.
template <class S>
BasicContinuousState<S> step_deterministic(const BasicContinuousState<S>& state, const GridState& grid,
                                           const BasicSimConfig<S>& cfg, Exec exec = Exec::parallel) {
  const SpreadTables<S> tables(grid, cfg);
  BasicContinuousState<S> out = state;
  step_deterministic_into(state, out, tables, cfg, exec);
  return out;
}

// Step-indexed wind sequence, held constant past its end.
class WindSchedule {
 public:
  WindSchedule() = default;
  explicit WindSchedule(std::vector<WindField> winds);

  bool empty() const { return winds_.empty(); }
  std::size_t size() const { return winds_.size(); }
  const WindField& at_step(std::uint64_t t) const;

 private:
  std::vector<WindField> winds_;
};

// One stochastic Bernoulli step. Cell (row-major index i) consumes exactly one
// uniform draw in the fire-event domain of `key`; unburned cells ignite with
// p_ignite, burning cells persist with p_continue or burn out.
FireLayer step_stochastic(const FireLayer& fire, const SpreadTables<double>& tables,
                          const SimConfig& cfg, const RngKey& key, Exec exec = Exec::parallel);
FireLayer step_stochastic(const FireLayer& fire, const GridState& grid, const SimConfig& cfg,
                          const RngKey& key, Exec exec = Exec::parallel);

struct StochasticRun {
  FireLayer final_state;
  std::vector<FireLayer> trajectory;  // populated only when record=true; includes the initial state
};

// Applies `steps` stochastic steps; step t uses RngKey{seed, key.step + t, stream}.
StochasticRun run_stochastic(const FireLayer& initial, const GridState& grid, const SimConfig& cfg,
                             RngKey key, int steps, bool record = false,
                             const WindSchedule* schedule = nullptr, Exec exec = Exec::parallel);

template <class S>
struct DeterministicRun {
  BasicContinuousState<S> final_state;
  std::vector<BasicContinuousState<S>> trajectory;
};

template <class S>
DeterministicRun<S> run_deterministic(const BasicContinuousState<S>& initial, const GridState& grid,
                                      const BasicSimConfig<S>& cfg, int steps, bool record = false,
                                      const WindSchedule* schedule = nullptr,
                                      Exec exec = Exec::parallel) {
  SpreadTables<S> tables(grid, cfg);
  DeterministicRun<S> out;
  BasicContinuousState<S> cur = initial;
  BasicContinuousState<S> next = initial;
  if (record) out.trajectory.push_back(cur);
  for (int t = 0; t < steps; ++t) {
    if (schedule != nullptr && !schedule->empty()) {
      tables.set_wind(schedule->at_step(static_cast<std::uint64_t>(t)), cfg);
    }
    step_deterministic_into(cur, next, tables, cfg, exec);
    std::swap(cur, next);
    if (record) out.trajectory.push_back(cur);
  }
  out.final_state = std::move(cur);
  return out;
}

// Lockstep batch of independent stochastic simulations sharing one grid and
// config. Member k's trajectory is bitwise identical to a solo run with
// RngKey{seed, ., stream_k}: streams fully determine the randomness.
struct StochasticBatch {
  std::uint64_t seed = 0;
  std::uint64_t step = 0;  // lockstep time index, incremented by step_batch
  struct Member {
    FireLayer fire;
    std::uint64_t stream = 0;
  };
  std::vector<Member> members;
};

StochasticBatch make_stochastic_batch(const FireLayer& initial, int count, std::uint64_t seed,
                                      std::uint64_t first_stream = 0);

void step_batch(StochasticBatch& batch, const SpreadTables<double>& tables, const SimConfig& cfg,
                Exec exec = Exec::parallel);
void step_batch(StochasticBatch& batch, const GridState& grid, const SimConfig& cfg,
                Exec exec = Exec::parallel);

// Lockstep batch of independent deterministic simulations; amortizes the
// per-step table across members.
struct DeterministicBatch {
  std::uint64_t step = 0;
  std::vector<ContinuousState> members;
};

void step_batch(DeterministicBatch& batch, const SpreadTables<double>& tables, const SimConfig& cfg,
                Exec exec = Exec::parallel);
void step_batch(DeterministicBatch& batch, const GridState& grid, const SimConfig& cfg,
                Exec exec = Exec::parallel);

struct FireFractions {
  double unburned = 0.0;
  double burning = 0.0;
  double burned = 0.0;
};

FireFractions fire_fraction_stats(const FireLayer& fire);
FireFractions fire_fraction_stats(const ContinuousState& state);

}  // namespace emberline
