#include "emberline/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "emberline/errors.hpp"
#include "emberline/geodata.hpp"
#include "emberline/rng.hpp"

namespace emberline {

ParamArray params_of(const SimConfig& cfg) {
  return {cfg.p_base, cfg.alpha_w1, cfg.alpha_w2, cfg.alpha_s, cfg.alpha_gamma, cfg.p_continue};
}

SimConfig config_from_params(const ParamArray& theta, int max_steps) {
  SimConfig cfg;
  cfg.p_base = theta[kParamPBase];
  cfg.alpha_w1 = theta[kParamAlphaW1];
  cfg.alpha_w2 = theta[kParamAlphaW2];
  cfg.alpha_s = theta[kParamAlphaS];
  cfg.alpha_gamma = theta[kParamAlphaGamma];
  cfg.p_continue = theta[kParamPContinue];
  cfg.max_steps = max_steps;
  return cfg;
}

namespace {

double inverse_softplus(double y) {
  if (!(y > 0.0)) throw std::invalid_argument("inverse_softplus: argument must be > 0");
  // log(exp(y) - 1), stable on both ends.
  if (y > 20.0) return y;
  return std::log(std::expm1(y));
}

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("logit: argument must be in (0, 1)");
  return std::log(p / (1.0 - p));
}

}  // namespace

ParamArray ThetaTransform::unconstrain(const ParamArray& theta) {
  return {inverse_softplus(theta[kParamPBase]), theta[kParamAlphaW1], theta[kParamAlphaW2],
          theta[kParamAlphaS], inverse_softplus(theta[kParamAlphaGamma]),
          logit(theta[kParamPContinue])};
}

void validate_target(const CalibrationTarget& target, int height, int width) {
  if (target.burn_mask.height() != height || target.burn_mask.width() != width) {
    throw std::invalid_argument("CalibrationTarget: mask is " +
                                std::to_string(target.burn_mask.height()) + "x" +
                                std::to_string(target.burn_mask.width()) + ", expected " +
                                std::to_string(height) + "x" + std::to_string(width));
  }
  bool any = false;
  for (double v : target.burn_mask.data()) {
    if (v != 0.0 && v != 1.0) {
      throw std::invalid_argument("CalibrationTarget: mask values must be 0 or 1");
    }
    if (v == 1.0) any = true;
  }
  if (!any) throw std::invalid_argument("CalibrationTarget: mask has no burned cells");
  if (target.horizon < 0) throw std::invalid_argument("CalibrationTarget: negative horizon");
}

void validate_loss_config(const LossConfig& lc) {
  if (!(lc.bce_weight >= 0.0) || !(lc.mse_weight >= 0.0)) {
    throw std::invalid_argument("LossConfig: weights must be >= 0");
  }
  if (lc.bce_weight == 0.0 && lc.mse_weight == 0.0) {
    throw std::invalid_argument("LossConfig: at least one weight must be positive");
  }
  if (lc.pool_size < 1) throw std::invalid_argument("LossConfig: pool_size must be >= 1");
  if (!(lc.bce_epsilon > 0.0 && lc.bce_epsilon < 0.5)) {
    throw std::invalid_argument("LossConfig: bce_epsilon must be in (0, 0.5)");
  }
}

ParamArray adam_step(AdamState& state, const ParamArray& grad, const ParamArray& theta) {
  for (std::size_t i = 0; i < kParamCount; ++i) {
    if (!std::isfinite(grad[i])) {
      throw NumericalError("adam_step: non-finite gradient component " + std::string(param_name(i)));
    }
  }
  state.t += 1;
  ParamArray next = theta;
  const double bc1 = 1.0 - std::pow(state.beta1, state.t);
  const double bc2 = 1.0 - std::pow(state.beta2, state.t);
  for (std::size_t i = 0; i < kParamCount; ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    next[i] = theta[i] - state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
  return next;
}

CalibrationResult calibrate(const GridState& grid, const ContinuousState& initial,
                            const CalibrationTarget& target, const LossConfig& lc,
                            const CalibrationOptions& opts) {
  validate_target(target, grid.height(), grid.width());
  validate_loss_config(lc);
  validate_state(initial);
  if (opts.iterations < 0) throw std::invalid_argument("calibrate: negative iteration count");
  if (target.horizon > opts.max_horizon) {
    throw std::invalid_argument("calibrate: horizon " + std::to_string(target.horizon) +
                                " exceeds the configured maximum " +
                                std::to_string(opts.max_horizon));
  }

  ParamArray u = ThetaTransform::unconstrain(opts.init_theta);
  AdamState adam;
  adam.lr = opts.lr;

  CalibrationResult result;
  result.loss_history.reserve(static_cast<std::size_t>(opts.iterations) + 1);
  result.theta_history.reserve(static_cast<std::size_t>(opts.iterations) + 1);
  result.best_loss = std::numeric_limits<double>::infinity();

  const BasicContinuousState<ParamDual> lifted_initial = lift_state<kParamCount>(initial);

  for (int iter = 0; iter <= opts.iterations; ++iter) {
    std::array<ParamDual, kParamCount> u_dual;
    for (std::size_t i = 0; i < kParamCount; ++i) {
      u_dual[i] = opts.optimize[i] ? lift_parameter<kParamCount>(i, u[i])
                                   : lift_constant<kParamCount>(u[i]);
    }
    const std::array<ParamDual, kParamCount> theta_dual = ThetaTransform::constrain(u_dual);

    BasicSimConfig<ParamDual> cfg;
    cfg.p_base = theta_dual[kParamPBase];
    cfg.alpha_w1 = theta_dual[kParamAlphaW1];
    cfg.alpha_w2 = theta_dual[kParamAlphaW2];
    cfg.alpha_s = theta_dual[kParamAlphaS];
    cfg.alpha_gamma = theta_dual[kParamAlphaGamma];
    cfg.p_continue = theta_dual[kParamPContinue];

    const auto rollout =
        run_deterministic(lifted_initial, grid, cfg, target.horizon, false, nullptr, opts.exec);
    const Grid<ParamDual> pred = burn_probability_map(rollout.final_state);
    const ParamDual l = loss(pred, target, lc);
    if (!std::isfinite(l.value)) {
      throw NumericalError("calibrate: loss became non-finite at iteration " +
                           std::to_string(iter));
    }

    ParamArray theta_now;
    for (std::size_t i = 0; i < kParamCount; ++i) theta_now[i] = theta_dual[i].value;
    result.loss_history.push_back(l.value);
    result.theta_history.push_back(theta_now);
    if (l.value < result.best_loss) {
      result.best_loss = l.value;
      result.best_theta = theta_now;
    }
    if (iter == opts.iterations) break;
    u = adam_step(adam, l.grad, u);
  }

  result.initial_loss = result.loss_history.front();
  return result;
}

Grid<std::uint8_t> threshold_mask(const Grid<double>& prob, double threshold) {
  Grid<std::uint8_t> mask(prob.height(), prob.width());
  for (int i = 0; i < prob.size(); ++i) mask[i] = prob[i] >= threshold ? 1 : 0;
  return mask;
}

double iou(const Grid<std::uint8_t>& a, const Grid<std::uint8_t>& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw std::invalid_argument("iou: mask dimensions differ");
  }
  int inter = 0;
  int uni = 0;
  for (int i = 0; i < a.size(); ++i) {
    const bool pa = a[i] != 0;
    const bool pb = b[i] != 0;
    if (pa && pb) ++inter;
    if (pa || pb) ++uni;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

SelfCalibrationReport run_self_calibration(std::uint64_t seed, int iterations, Exec exec) {
  // Fixed scenario: 32x32 synthetic forest, center ignition, known theta*.
  SyntheticOptions env_opts;
  env_opts.forest_density = 1.0;
  env_opts.elevation_roughness = 0.6;
  env_opts.wind_speed = 1.5;
  env_opts.wind_direction = 0.9;
  const GridState grid = synthetic_environment(32, 32, seed, env_opts);

  FireLayer fire(32, 32, FireState::Unburned);
  fire(16, 16) = FireState::Burning;
  const ContinuousState initial = state_from_fire(fire);

  const ParamArray true_theta = {0.22, 0.15, 0.3, 0.8, 1.1, 0.7};
  const int horizon = 22;

  const auto target_rollout = run_deterministic(initial, grid, config_from_params(true_theta),
                                                horizon, false, nullptr, exec);
  const Grid<double> target_prob = burn_probability_map(target_rollout.final_state);
  CalibrationTarget target;
  target.burn_mask = Grid<double>(32, 32);
  const Grid<std::uint8_t> target_mask = threshold_mask(target_prob);
  for (int i = 0; i < target.burn_mask.size(); ++i) {
    target.burn_mask[i] = target_mask[i] != 0 ? 1.0 : 0.0;
  }
  target.horizon = horizon;

  // +-50% multiplicative perturbation, reproducible from the seed.
  CalibrationOptions opts;
  opts.iterations = iterations;
  opts.exec = exec;
  const RngKey perturb_key{seed, 10, 0};
  for (std::size_t i = 0; i < kParamCount; ++i) {
    const double factor = 0.5 + rng_uniform(perturb_key, i, kDrawEnvSetup);
    opts.init_theta[i] = true_theta[i] * factor;
  }
  // Keep the perturbed start inside the transform's domain.
  opts.init_theta[kParamPBase] = std::max(opts.init_theta[kParamPBase], 1e-3);
  opts.init_theta[kParamAlphaGamma] = std::max(opts.init_theta[kParamAlphaGamma], 1e-3);
  opts.init_theta[kParamPContinue] =
      std::min(std::max(opts.init_theta[kParamPContinue], 0.02), 0.98);

  const LossConfig lc;
  const CalibrationResult result = calibrate(grid, initial, target, lc, opts);

  const auto final_rollout = run_deterministic(
      initial, grid, config_from_params(result.best_theta), horizon, false, nullptr, exec);
  const Grid<double> final_prob = burn_probability_map(final_rollout.final_state);

  SelfCalibrationReport report;
  report.true_theta = true_theta;
  report.init_theta = opts.init_theta;
  report.recovered_theta = result.best_theta;
  report.initial_loss = result.initial_loss;
  report.final_loss = result.best_loss;
  report.iou_value = iou(threshold_mask(final_prob), target_mask);
  report.iterations = iterations;
  return report;
}

}  // namespace emberline
