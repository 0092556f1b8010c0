// Per-cell spread math: wind factor, slope factor, propagation potential,
// arrival intensity, and ignition probability.
//
// Every function is generic over the scalar type S (double or Dual<N>) so the
// calibration path reuses the exact same formulas. The expression associations
// below are fixed on purpose: the engine's table-based fast path, the serial
// reference path, and the dual-number path must all produce bitwise-identical
// values, which requires one canonical order of floating-point operations.
// Compiled with -ffp-contract=off for the same reason.
#pragma once

#include <cmath>

#include "emberline/dual.hpp"
#include "emberline/grid.hpp"

namespace emberline {

// Wind influence on spread from a cell toward offset d. Equals 1 in calm air
// and exp(alpha_w1 * V) when the offset direction aligns with the wind.
template <class S>
S kappa_wind(double speed, double direction, NeighborOffset d, const BasicSimConfig<S>& cfg) {
  using std::exp;
  const double align = std::cos(offset_angle(d) - direction) - 1.0;
  return exp(cfg.alpha_w1 * speed) * exp((cfg.alpha_w2 * speed) * align);
}

// Slope influence: > 1 uphill, < 1 downhill. s is the inclination in radians.
template <class S>
S kappa_slope(double s, const BasicSimConfig<S>& cfg) {
  using std::exp;
  return exp(cfg.alpha_s * s);
}

// Propagation potential phi(u, d): how strongly a burning cell u pushes fire
// toward its neighbor in direction d. Uses the source cell's fuel and wind.
template <class S>
S potential(CellIndex u, NeighborOffset d, const GridState& grid, const BasicSimConfig<S>& cfg) {
  const S source =
      (cfg.p_base * (1.0 + grid.fuel().veg(u.row, u.col))) * (1.0 + grid.fuel().den(u.row, u.col));
  const S wind = kappa_wind(grid.wind().speed(u.row, u.col), grid.wind().direction(u.row, u.col),
                            d, cfg);
  const S slope = kappa_slope(grid.slope().toward(u.row, u.col, offset_index(d)), cfg);
  return (source * wind) * slope;
}

// Arrival intensity lambda(v): weighted sum of potentials from the 8 neighbors
// into v. burning_weight(row, col) supplies b(u) (0/1 in stochastic mode) or
// p_burn(u) (deterministic mode). Out-of-bounds neighbors contribute nothing.
//
// The fold runs in fixed k = 0..7 order over kNeighborOffsets, skipping terms
// whose weight is exactly zero; both choices are part of the bitwise contract.
template <class S, class WeightFn>
S arrival_intensity(CellIndex v, WeightFn&& burning_weight, const GridState& grid,
                    const BasicSimConfig<S>& cfg) {
  S lambda{0.0};
  for (int k = 0; k < 8; ++k) {
    const NeighborOffset d = kNeighborOffsets[k];
    const int ur = v.row - d.dy;
    const int uc = v.col - d.dx;
    if (ur < 0 || ur >= grid.height() || uc < 0 || uc >= grid.width()) continue;
    const auto w = burning_weight(ur, uc);
    if (value_of(w) == 0.0) continue;
    lambda += w * potential(CellIndex{ur, uc}, d, grid, cfg);
  }
  return lambda;
}

// Ignition probability of target cell v given arrival intensity lambda:
// p = 1 - exp(-gamma(v) * lambda), gamma from the TARGET cell's fuel.
template <class S, class L>
S ignition_probability(CellIndex v, const L& lambda, const GridState& grid,
                       const BasicSimConfig<S>& cfg) {
  using std::exp;
  const S gamma =
      (cfg.alpha_gamma * (1.0 + grid.fuel().veg(v.row, v.col))) * (1.0 + grid.fuel().den(v.row, v.col));
  return 1.0 - exp(-(gamma * lambda));
}

}  // namespace emberline
