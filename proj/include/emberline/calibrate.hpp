// Parameter calibration against an observed burn mask: deterministic rollout
// with dual-number scalars, combined BCE + pooled-MSE loss, Adam updates in
// an unconstrained parameter space.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "emberline/dual.hpp"
#include "emberline/engine.hpp"
#include "emberline/grid.hpp"

namespace emberline {

inline constexpr std::size_t kParamCount = 6;
using ParamDual = Dual<kParamCount>;
using ParamArray = std::array<double, kParamCount>;

// Calibrated-parameter ordering within ParamArray / gradient vectors.
enum ParamIndex : std::size_t {
  kParamPBase = 0,
  kParamAlphaW1 = 1,
  kParamAlphaW2 = 2,
  kParamAlphaS = 3,
  kParamAlphaGamma = 4,
  kParamPContinue = 5,
};

inline const char* param_name(std::size_t i) {
  constexpr const char* names[kParamCount] = {"p_base",  "alpha_w1",    "alpha_w2",
                                              "alpha_s", "alpha_gamma", "p_continue"};
  return names[i];
}

ParamArray params_of(const SimConfig& cfg);
SimConfig config_from_params(const ParamArray& theta, int max_steps = 200);

// Numerically stable softplus / logistic implemented with exp and log only,
// so the same code runs on doubles and on Dual scalars.
template <class S>
S softplus(const S& x) {
  using std::exp;
  using std::log;
  if (x > 0.0) return x + log(1.0 + exp(-x));
  return log(1.0 + exp(x));
}

template <class S>
S logistic(const S& x) {
  using std::exp;
  if (x >= 0.0) return 1.0 / (1.0 + exp(-x));
  const S e = exp(x);
  return e / (1.0 + e);
}

// Unconstrained optimizer space <-> constrained parameter space:
// p_base and alpha_gamma through softplus (positive), p_continue through the
// logistic (in (0,1)), the three alphas untouched.
struct ThetaTransform {
  template <class S>
  static std::array<S, kParamCount> constrain(const std::array<S, kParamCount>& u) {
    return {softplus(u[kParamPBase]), u[kParamAlphaW1], u[kParamAlphaW2], u[kParamAlphaS],
            softplus(u[kParamAlphaGamma]), logistic(u[kParamPContinue])};
  }
  // Inverse map; requires p_base > 0, alpha_gamma > 0, p_continue in (0, 1).
  static ParamArray unconstrain(const ParamArray& theta);
};

struct CalibrationTarget {
  Grid<double> burn_mask;  // 0/1 per cell, at least one 1
  int horizon = 0;         // simulation steps to the observation time
};

struct LossConfig {
  double bce_weight = 1.0;
  double mse_weight = 1.0;
  int pool_size = 4;
  double bce_epsilon = 1e-6;
};

void validate_target(const CalibrationTarget& target, int height, int width);
void validate_loss_config(const LossConfig& lc);

// Probability a cell has ever been on fire: p_burn + p_bd.
template <class S>
Grid<S> burn_probability_map(const BasicContinuousState<S>& state) {
  Grid<S> out(state.height(), state.width());
  for (int i = 0; i < out.size(); ++i) out[i] = state.p_burn[i] + state.p_bd[i];
  return out;
}

// Non-overlapping pool_size x pool_size average pooling; edge windows average
// over their in-bounds cells.
template <class S>
Grid<S> avgpool(const Grid<S>& g, int pool_size) {
  if (pool_size < 1) throw std::invalid_argument("avgpool: pool_size must be >= 1");
  const int oh = (g.height() + pool_size - 1) / pool_size;
  const int ow = (g.width() + pool_size - 1) / pool_size;
  Grid<S> out(oh, ow);
  for (int pr = 0; pr < oh; ++pr) {
    for (int pc = 0; pc < ow; ++pc) {
      S sum{0.0};
      int count = 0;
      for (int r = pr * pool_size; r < (pr + 1) * pool_size && r < g.height(); ++r) {
        for (int c = pc * pool_size; c < (pc + 1) * pool_size && c < g.width(); ++c) {
          sum += g(r, c);
          ++count;
        }
      }
      out(pr, pc) = sum / static_cast<double>(count);
    }
  }
  return out;
}

// bce_weight * mean-BCE(clamped pred, mask) + mse_weight * MSE(pooled pred,
// pooled mask). pred entries must lie in [0, 1].
template <class S>
S loss(const Grid<S>& pred, const CalibrationTarget& target, const LossConfig& lc) {
  using std::log;
  using std::max;
  using std::min;
  if (pred.height() != target.burn_mask.height() || pred.width() != target.burn_mask.width()) {
    throw std::invalid_argument("loss: prediction and mask dimensions differ");
  }
  const int n = pred.size();
  S bce{0.0};
  for (int i = 0; i < n; ++i) {
    const S p = min(max(pred[i], lc.bce_epsilon), 1.0 - lc.bce_epsilon);
    const double m = target.burn_mask[i];
    bce += -(m * log(p) + (1.0 - m) * log(1.0 - p));
  }
  bce = bce / static_cast<double>(n);

  const Grid<S> pooled_pred = avgpool(pred, lc.pool_size);
  const Grid<double> pooled_mask = avgpool(target.burn_mask, lc.pool_size);
  S mse{0.0};
  for (int i = 0; i < pooled_pred.size(); ++i) {
    const S d = pooled_pred[i] - pooled_mask[i];
    mse += d * d;
  }
  mse = mse / static_cast<double>(pooled_pred.size());

  return lc.bce_weight * bce + lc.mse_weight * mse;
}

struct AdamState {
  ParamArray m{};  // first moments
  ParamArray v{};  // second moments
  int t = 0;
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update (minimizing). Throws NumericalError on a
// non-finite gradient component.
ParamArray adam_step(AdamState& state, const ParamArray& grad, const ParamArray& theta);

struct CalibrationOptions {
  int iterations = 300;
  ParamArray init_theta = params_of(SimConfig{});
  std::array<bool, kParamCount> optimize = {true, true, true, true, true, true};
  double lr = 1e-2;
  int max_horizon = 2000;
  Exec exec = Exec::parallel;
};

struct CalibrationResult {
  ParamArray best_theta{};              // constrained space
  double best_loss = 0.0;
  double initial_loss = 0.0;
  std::vector<double> loss_history;     // length iterations + 1
  std::vector<ParamArray> theta_history;  // constrained, same length
};

// Lifts theta through ThetaTransform, rolls out the deterministic update for
// target.horizon steps, differentiates the loss, and applies Adam. Returns
// the best-loss theta seen plus full histories. Deterministic.
CalibrationResult calibrate(const GridState& grid, const ContinuousState& initial,
                            const CalibrationTarget& target, const LossConfig& lc,
                            const CalibrationOptions& opts);

Grid<std::uint8_t> threshold_mask(const Grid<double>& prob, double threshold = 0.5);

// |intersection| / |union| of two binary masks; 1 when both are empty.
double iou(const Grid<std::uint8_t>& a, const Grid<std::uint8_t>& b);

// End-to-end synthetic recovery check: generates a target from a known theta*
// on a 32x32 synthetic grid, perturbs it +-50% multiplicatively, calibrates,
// and reports loss reduction plus IoU of the recovered prediction.
struct SelfCalibrationReport {
  ParamArray true_theta{};
  ParamArray init_theta{};
  ParamArray recovered_theta{};
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double iou_value = 0.0;
  int iterations = 0;
};

SelfCalibrationReport run_self_calibration(std::uint64_t seed, int iterations = 300,
                                           Exec exec = Exec::parallel);

}  // namespace emberline
