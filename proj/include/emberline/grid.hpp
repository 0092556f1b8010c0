// Simulation state layers for the cellular-automaton fire model: discrete
// fire states, wind, fuel modifiers, the 8-direction slope field, and the
// tunable spread parameters.
//
// Axis convention: columns increase eastward (+x), rows increase northward
// (+y). File ingestion (geodata) performs any needed row flip so that this
// convention holds everywhere in memory.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace emberline {

// Dense row-major H x W layer.
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(int height, int width, T fill = T{}) {
    if (height < 1 || width < 1) {
      throw std::invalid_argument("Grid: dimensions must be at least 1x1");
    }
    h_ = height;
    w_ = width;
    data_.assign(static_cast<std::size_t>(h_) * w_, fill);
  }

  int height() const { return h_; }
  int width() const { return w_; }
  int size() const { return h_ * w_; }
  bool in_bounds(int row, int col) const {
    return row >= 0 && row < h_ && col >= 0 && col < w_;
  }
  int index(int row, int col) const { return row * w_ + col; }

  T& operator()(int row, int col) { return data_[index(row, col)]; }
  const T& operator()(int row, int col) const { return data_[index(row, col)]; }
  T& operator[](int i) { return data_[i]; }
  const T& operator[](int i) const { return data_[i]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  int h_ = 0;
  int w_ = 0;
  std::vector<T> data_;
};

struct CellIndex {
  int row = 0;
  int col = 0;
  bool operator==(const CellIndex&) const = default;
};

// Offset toward one of the 8 neighbors: dx east, dy north.
struct NeighborOffset {
  int dx = 0;
  int dy = 0;
  bool operator==(const NeighborOffset&) const = default;
};

// Fixed enumeration order: counter-clockwise starting from east.
inline constexpr std::array<NeighborOffset, 8> kNeighborOffsets = {{
    {1, 0},    // E
    {1, 1},    // NE
    {0, 1},    // N
    {-1, 1},   // NW
    {-1, 0},   // W
    {-1, -1},  // SW
    {0, -1},   // S
    {1, -1},   // SE
}};

inline bool valid_offset(NeighborOffset d) {
  return d.dx >= -1 && d.dx <= 1 && d.dy >= -1 && d.dy <= 1 && !(d.dx == 0 && d.dy == 0);
}

int offset_index(NeighborOffset d);
inline int opposite_index(int k) { return (k + 4) % 8; }

// Angle of the offset in [0, 2*pi): east = 0, counting counter-clockwise.
double offset_angle(NeighborOffset d);

// Wraps an angle into [0, 2*pi).
double wrap_angle(double a);

enum class FireState : std::uint8_t { Unburned = 0, Burning = 1, Burned = 2 };

using FireLayer = Grid<FireState>;

// Per-cell wind speed (dimensionless, >= 0) and direction in [0, 2*pi)
// measured from east, counter-clockwise. Directions are wrapped at
// construction; negative or non-finite speeds are rejected.
class WindField {
 public:
  WindField(Grid<double> speed, Grid<double> direction);
  static WindField uniform(int height, int width, double speed, double direction);

  int height() const { return speed_.height(); }
  int width() const { return speed_.width(); }
  double speed(int row, int col) const { return speed_(row, col); }
  double direction(int row, int col) const { return direction_(row, col); }
  const Grid<double>& speed_layer() const { return speed_; }
  const Grid<double>& direction_layer() const { return direction_; }

  bool operator==(const WindField&) const = default;

 private:
  Grid<double> speed_;
  Grid<double> direction_;
};

// Canopy ignition modifier (veg) and ground-fuel density modifier (den),
// both clamped to [-1, 1] at construction. NaN is rejected.
class FuelField {
 public:
  FuelField(Grid<double> veg, Grid<double> den);
  static FuelField uniform(int height, int width, double veg, double den);

  int height() const { return veg_.height(); }
  int width() const { return veg_.width(); }
  double veg(int row, int col) const { return veg_(row, col); }
  double den(int row, int col) const { return den_(row, col); }
  const Grid<double>& veg_layer() const { return veg_; }
  const Grid<double>& den_layer() const { return den_; }

  bool operator==(const FuelField&) const = default;

 private:
  Grid<double> veg_;
  Grid<double> den_;
};

// Terrain inclination toward each of the 8 neighbors, in radians. Positive
// means uphill in the propagation direction. Interior cells satisfy
// S(u, d) == -S(u + d, -d).
class SlopeField {
 public:
  SlopeField() = default;
  SlopeField(int height, int width);

  int height() const { return h_; }
  int width() const { return w_; }
  double toward(int row, int col, int offset_idx) const {
    return values_[static_cast<std::size_t>(row * w_ + col) * 8 + offset_idx];
  }
  void set_toward(int row, int col, int offset_idx, double slope);

  bool operator==(const SlopeField&) const = default;

 private:
  int h_ = 0;
  int w_ = 0;
  std::vector<double> values_;
};

// The six tunable spread parameters plus grid-independent run limits.
// Generic over the scalar type so calibration can run the same formulas
// with derivative-carrying scalars.
template <class S>
struct BasicSimConfig {
  S p_base{0.12};       // base propagation factor, > 0
  S alpha_w1{0.2};      // wind speed influence
  S alpha_w2{0.4};      // wind alignment influence
  S alpha_s{1.0};       // slope influence
  S alpha_gamma{1.0};   // ignition susceptibility scale, > 0
  S p_continue{0.6};    // probability a burning cell keeps burning, in [0, 1]
  int max_steps = 200;
};

using SimConfig = BasicSimConfig<double>;

// Throws std::invalid_argument on out-of-range parameters. Advisory: the
// step functions themselves are total on any finite config (tests exercise
// degenerate settings such as p_base = 0).
void validate_config(const SimConfig& cfg);

// All simulation layers bundled with their shared dimensions. Immutable
// after construction; stepping produces new fire layers instead of mutating
// this state.
class GridState {
 public:
  GridState(FireLayer fire, WindField wind, FuelField fuel, SlopeField slope);

  int height() const { return fire_.height(); }
  int width() const { return fire_.width(); }
  const FireLayer& fire() const { return fire_; }
  const WindField& wind() const { return wind_; }
  const FuelField& fuel() const { return fuel_; }
  const SlopeField& slope() const { return slope_; }

  // Copy of this state with a different wind field (used by wind schedules).
  GridState with_wind(WindField wind) const;

 private:
  FireLayer fire_;
  WindField wind_;
  FuelField fuel_;
  SlopeField slope_;
};

// Validated construction of a GridState from its layers.
inline GridState new_grid(FireLayer fire, WindField wind, FuelField fuel, SlopeField slope) {
  return GridState(std::move(fire), std::move(wind), std::move(fuel), std::move(slope));
}

}  // namespace emberline
