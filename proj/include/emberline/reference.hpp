// Straight-line serial reference for both update modes, written directly
// against the per-cell kernel functions with no table caching or parallelism.
// The engine must match these bit for bit; the test suite and the benchmark
// target compare the two.
#pragma once

#include <cmath>

#include "emberline/engine.hpp"
#include "emberline/grid.hpp"
#include "emberline/kernel.hpp"
#include "emberline/rng.hpp"

namespace emberline {

inline FireLayer reference_step_stochastic(const FireLayer& fire, const GridState& grid,
                                           const SimConfig& cfg, const RngKey& key) {
  const int h = fire.height();
  const int w = fire.width();
  FireLayer next(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int i = fire.index(r, c);
      switch (fire(r, c)) {
        case FireState::Burned:
          next(r, c) = FireState::Burned;
          break;
        case FireState::Burning: {
          const double u = rng_uniform(key, static_cast<std::uint64_t>(i), kDrawFireEvent);
          next(r, c) = u < cfg.p_continue ? FireState::Burning : FireState::Burned;
          break;
        }
        case FireState::Unburned: {
          const double u = rng_uniform(key, static_cast<std::uint64_t>(i), kDrawFireEvent);
          const double lambda = arrival_intensity(
              CellIndex{r, c},
              [&](int rr, int cc) { return fire(rr, cc) == FireState::Burning ? 1.0 : 0.0; },
              grid, cfg);
          const double p = ignition_probability(CellIndex{r, c}, lambda, grid, cfg);
          next(r, c) = u < p ? FireState::Burning : FireState::Unburned;
          break;
        }
      }
    }
  }
  return next;
}

inline ContinuousState reference_step_deterministic(const ContinuousState& state,
                                                    const GridState& grid, const SimConfig& cfg) {
  const int h = state.height();
  const int w = state.width();
  ContinuousState next{Grid<double>(h, w), Grid<double>(h, w), Grid<double>(h, w)};
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int i = state.p_un.index(r, c);
      const double lambda = arrival_intensity(
          CellIndex{r, c}, [&](int rr, int cc) { return state.p_burn(rr, cc); }, grid, cfg);
      const double p_ig = ignition_probability(CellIndex{r, c}, lambda, grid, cfg);
      const double newly = state.p_un[i] * p_ig;
      const double continuing = state.p_burn[i] * cfg.p_continue;
      const double burned_now = state.p_burn[i] * (1.0 - cfg.p_continue);
      next.p_burn[i] = newly + continuing;
      next.p_un[i] = state.p_un[i] - newly;
      next.p_bd[i] = state.p_bd[i] + burned_now;
    }
  }
  return next;
}

}  // namespace emberline
