#include "emberline/grid.hpp"

#include <algorithm>
#include <cmath>

namespace emberline {

namespace {

void reject_nan(const Grid<double>& layer, const char* name) {
  for (double v : layer.data()) {
    if (std::isnan(v)) {
      throw std::invalid_argument(std::string(name) + ": NaN value in layer");
    }
  }
}

void require_same_dims(int h, int w, int lh, int lw, const char* name) {
  if (lh != h || lw != w) {
    throw std::invalid_argument(std::string("GridState: ") + name + " layer is " +
                                std::to_string(lh) + "x" + std::to_string(lw) +
                                ", expected " + std::to_string(h) + "x" + std::to_string(w));
  }
}

}  // namespace

int offset_index(NeighborOffset d) {
  for (int k = 0; k < 8; ++k) {
    if (kNeighborOffsets[k] == d) return k;
  }
  throw std::invalid_argument("offset_index: not a neighbor offset");
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w < 0.0) w += two_pi;
  return w;
}

double offset_angle(NeighborOffset d) {
  if (!valid_offset(d)) {
    throw std::invalid_argument("offset_angle: not a neighbor offset");
  }
  return wrap_angle(std::atan2(static_cast<double>(d.dy), static_cast<double>(d.dx)));
}

WindField::WindField(Grid<double> speed, Grid<double> direction)
    : speed_(std::move(speed)), direction_(std::move(direction)) {
  if (speed_.height() != direction_.height() || speed_.width() != direction_.width()) {
    throw std::invalid_argument("WindField: speed and direction dimensions differ");
  }
  for (double v : speed_.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("WindField: non-finite speed");
    if (v < 0.0) throw std::invalid_argument("WindField: negative speed");
  }
  for (double& v : direction_.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("WindField: non-finite direction");
    v = wrap_angle(v);
  }
}

WindField WindField::uniform(int height, int width, double speed, double direction) {
  return WindField(Grid<double>(height, width, speed), Grid<double>(height, width, direction));
}

FuelField::FuelField(Grid<double> veg, Grid<double> den)
    : veg_(std::move(veg)), den_(std::move(den)) {
  if (veg_.height() != den_.height() || veg_.width() != den_.width()) {
    throw std::invalid_argument("FuelField: veg and den dimensions differ");
  }
  reject_nan(veg_, "FuelField veg");
  reject_nan(den_, "FuelField den");
  for (double& v : veg_.data()) v = std::clamp(v, -1.0, 1.0);
  for (double& v : den_.data()) v = std::clamp(v, -1.0, 1.0);
}

FuelField FuelField::uniform(int height, int width, double veg, double den) {
  return FuelField(Grid<double>(height, width, veg), Grid<double>(height, width, den));
}

SlopeField::SlopeField(int height, int width) : h_(height), w_(width) {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("SlopeField: dimensions must be at least 1x1");
  }
  values_.assign(static_cast<std::size_t>(h_) * w_ * 8, 0.0);
}

void SlopeField::set_toward(int row, int col, int offset_idx, double slope) {
  if (std::isnan(slope)) throw std::invalid_argument("SlopeField: NaN slope");
  values_[static_cast<std::size_t>(row * w_ + col) * 8 + offset_idx] = slope;
}

void validate_config(const SimConfig& cfg) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(cfg.p_base) || cfg.p_base <= 0.0) {
    throw std::invalid_argument("SimConfig: p_base must be > 0");
  }
  if (!finite(cfg.alpha_gamma) || cfg.alpha_gamma <= 0.0) {
    throw std::invalid_argument("SimConfig: alpha_gamma must be > 0");
  }
  if (!finite(cfg.p_continue) || cfg.p_continue < 0.0 || cfg.p_continue > 1.0) {
    throw std::invalid_argument("SimConfig: p_continue must be in [0, 1]");
  }
  if (!finite(cfg.alpha_w1) || !finite(cfg.alpha_w2) || !finite(cfg.alpha_s)) {
    throw std::invalid_argument("SimConfig: wind/slope parameters must be finite");
  }
  if (cfg.max_steps < 1) {
    throw std::invalid_argument("SimConfig: max_steps must be positive");
  }
}

GridState::GridState(FireLayer fire, WindField wind, FuelField fuel, SlopeField slope)
    : fire_(std::move(fire)), wind_(std::move(wind)), fuel_(std::move(fuel)),
      slope_(std::move(slope)) {
  const int h = fire_.height();
  const int w = fire_.width();
  if (h < 1 || w < 1) throw std::invalid_argument("GridState: empty fire layer");
  require_same_dims(h, w, wind_.height(), wind_.width(), "wind");
  require_same_dims(h, w, fuel_.height(), fuel_.width(), "fuel");
  require_same_dims(h, w, slope_.height(), slope_.width(), "slope");
  for (FireState s : fire_.data()) {
    const auto v = static_cast<std::uint8_t>(s);
    if (v > 2) throw std::invalid_argument("GridState: invalid fire state value");
  }
  for (int i = 0; i < h * w; ++i) {
    for (int k = 0; k < 8; ++k) {
      const double s = slope_.toward(i / w, i % w, k);
      if (std::isnan(s)) throw std::invalid_argument("GridState: NaN in slope layer");
    }
  }
}

GridState GridState::with_wind(WindField wind) const {
  GridState copy = *this;
  if (wind.height() != height() || wind.width() != width()) {
    throw std::invalid_argument("GridState::with_wind: dimension mismatch");
  }
  copy.wind_ = std::move(wind);
  return copy;
}

}  // namespace emberline
