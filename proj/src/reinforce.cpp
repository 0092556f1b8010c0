#include "emberline/reinforce.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "emberline/errors.hpp"

namespace emberline {

SoftmaxPolicy::SoftmaxPolicy(int obs_dim, int n_actions)
    : obs_dim_(obs_dim), n_actions_(n_actions) {
  if (obs_dim < 1 || n_actions < 1) {
    throw std::invalid_argument("SoftmaxPolicy: dimensions must be positive");
  }
  w_.assign(static_cast<std::size_t>(obs_dim_) * n_actions_, 0.0);
  b_.assign(static_cast<std::size_t>(n_actions_), 0.0);
}

std::vector<double> SoftmaxPolicy::action_probabilities(const Observation& obs) const {
  if (static_cast<int>(obs.values.size()) != obs_dim_) {
    throw std::invalid_argument("SoftmaxPolicy: observation size mismatch");
  }
  std::vector<double> logits(static_cast<std::size_t>(n_actions_), 0.0);
  for (int a = 0; a < n_actions_; ++a) {
    double z = b_[a];
    const double* row = w_.data() + static_cast<std::size_t>(a) * obs_dim_;
    for (int i = 0; i < obs_dim_; ++i) z += row[i] * obs.values[i];
    logits[a] = z;
  }
  const double zmax = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& z : logits) {
    z = std::exp(z - zmax);
    sum += z;
  }
  for (double& z : logits) z /= sum;
  return logits;
}

Action SoftmaxPolicy::act(const Observation& obs, const RngKey& key) const {
  const std::vector<double> probs = action_probabilities(obs);
  const double u = rng_uniform(key, 0, kDrawPolicy);
  double acc = 0.0;
  for (int a = 0; a < n_actions_; ++a) {
    acc += probs[a];
    if (u < acc) return action_from_index(a);
  }
  return action_from_index(n_actions_ - 1);  // guard against rounding in the cumulative sum
}

Action SoftmaxPolicy::greedy(const Observation& obs) const {
  const std::vector<double> probs = action_probabilities(obs);
  const auto best = std::max_element(probs.begin(), probs.end());
  return action_from_index(static_cast<int>(best - probs.begin()));
}

ReinforceResult train_reinforce(const FireSuppressionEnv& env, SoftmaxPolicy policy,
                                const ReinforceOptions& opts) {
  if (policy.obs_dim() != observation_size(env.config())) {
    throw std::invalid_argument("train_reinforce: policy observation size does not match env");
  }
  if (opts.episodes < 0) throw std::invalid_argument("train_reinforce: negative episode count");
  if (!(opts.discount >= 0.0 && opts.discount <= 1.0)) {
    throw std::invalid_argument("train_reinforce: discount must lie in [0, 1]");
  }
  if (!(opts.weight_decay >= 0.0 && opts.lr * opts.weight_decay < 1.0)) {
    throw std::invalid_argument("train_reinforce: weight decay must be nonnegative with lr*decay < 1");
  }

  ReinforceResult result;
  result.returns.reserve(static_cast<std::size_t>(opts.episodes));

  struct StepRecord {
    std::vector<double> obs;  // centered at the time the action was taken
    std::vector<double> probs;
    int action = 0;
    double reward = 0.0;
  };

  const int n_actions = policy.n_actions();
  const int obs_dim = policy.obs_dim();
  // Running mean of the discounted return-to-go at each timestep. Indexing
  // the baseline by time matters: with mostly negative rewards, returns-to-go
  // shrink toward zero mechanically as an episode winds down, and a single
  // scalar baseline would hand late actions a spurious positive advantage.
  std::vector<double> time_baseline(static_cast<std::size_t>(env.config().max_episode_steps), 0.0);
  std::vector<char> baseline_seen(time_baseline.size(), 0);
  // Running variance of the baseline residuals, used to normalize advantages.
  // Raw residuals span tens of reward units and their noise would dominate
  // the weight updates; dividing by a running std keeps each step's update
  // O(lr) so the decay term can actually hold the logits bounded. Updating
  // the variance before the division also caps the very first advantages.
  double resid_var = 1.0;

  // The trainer works on mean-centered features: logits = b + w·(obs − mu)
  // with mu a running mean of observed features. Centering matters here —
  // most window channels are "on" nearly every step, and against raw features
  // those act as correlated pseudo-biases: whichever action is sampled most
  // in lucky episodes snowballs until the softmax saturates, long before the
  // rare fire-conditional features can be credited. Around the mean, an
  // episode can only strengthen preferences tied to how its observations
  // differed from the typical one. The returned policy folds mu back into
  // its bias, so callers still get a plain linear softmax over raw features.
  std::vector<double> w = policy.weights();
  std::vector<double> b = policy.bias();
  std::vector<double> mu(static_cast<std::size_t>(obs_dim), 0.0);
  constexpr double kMuRate = 0.01;  // per-step running-mean rate

  const auto centered_probs = [&](const std::vector<double>& centered) {
    std::vector<double> z(static_cast<std::size_t>(n_actions), 0.0);
    for (int a = 0; a < n_actions; ++a) {
      double acc = b[static_cast<std::size_t>(a)];
      const double* row = w.data() + static_cast<std::size_t>(a) * obs_dim;
      for (int i = 0; i < obs_dim; ++i) acc += row[i] * centered[static_cast<std::size_t>(i)];
      z[static_cast<std::size_t>(a)] = acc;
    }
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
      v = std::exp(v - zmax);
      sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
  };

  for (int episode = 0; episode < opts.episodes; ++episode) {
    const std::uint64_t stream = opts.first_stream + static_cast<std::uint64_t>(episode);
    EnvState state = env.reset(opts.seed, stream);
    Observation obs = env.observe(state);
    std::vector<StepRecord> trajectory;
    double total = 0.0;
    while (!state.done) {
      const RngKey key{opts.seed, static_cast<std::uint64_t>(state.step), stream};
      StepRecord rec;
      rec.obs.resize(static_cast<std::size_t>(obs_dim));
      for (int i = 0; i < obs_dim; ++i) {
        const auto s = static_cast<std::size_t>(i);
        rec.obs[s] = obs.values[s] - mu[s];
        mu[s] += kMuRate * rec.obs[s];
      }
      rec.probs = centered_probs(rec.obs);
      const double u = rng_uniform(key, 0, kDrawPolicy);
      double acc = 0.0;
      rec.action = n_actions - 1;
      for (int a = 0; a < n_actions; ++a) {
        acc += rec.probs[a];
        if (u < acc) {
          rec.action = a;
          break;
        }
      }
      StepResult sr = env.step(state, action_from_index(rec.action));
      rec.reward = sr.reward;
      total += sr.reward;
      trajectory.push_back(std::move(rec));
      state = std::move(sr.state);
      obs = std::move(sr.observation);
    }
    result.returns.push_back(total);

    // Discounted returns-to-go, scored against the per-timestep baseline.
    std::vector<double> togo(trajectory.size(), 0.0);
    double g = 0.0;
    for (auto t = static_cast<int>(trajectory.size()) - 1; t >= 0; --t) {
      g = trajectory[static_cast<std::size_t>(t)].reward + opts.discount * g;
      togo[static_cast<std::size_t>(t)] = g;
    }

    // Only the feature weights train. In centered space the bias is a pure
    // unconditional action preference — on this family of tasks no fixed
    // action beats the uniform mixture, so bias learning can only feed the
    // saturation race. It stays at its initial value.
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
      const StepRecord& rec = trajectory[t];
      if (baseline_seen[t] == 0) {
        time_baseline[t] = togo[t];  // first visit trains with zero advantage
        baseline_seen[t] = 1;
      }
      const double resid = togo[t] - time_baseline[t];
      resid_var = 0.99 * resid_var + 0.01 * resid * resid;
      const double adv = resid / std::sqrt(resid_var);
      for (int a = 0; a < n_actions; ++a) {
        const double coeff = (a == rec.action ? 1.0 : 0.0) - rec.probs[a];
        const double scale = opts.lr * adv * coeff;
        if (scale == 0.0) continue;
        double* row = w.data() + static_cast<std::size_t>(a) * obs_dim;
        for (int i = 0; i < obs_dim; ++i) {
          if (rec.obs[static_cast<std::size_t>(i)] != 0.0) {
            row[i] += scale * rec.obs[static_cast<std::size_t>(i)];
          }
        }
      }
      time_baseline[t] = 0.9 * time_baseline[t] + 0.1 * togo[t];
    }
    // L2 shrink: weights become an exponential average of recent episode
    // gradients, so logits stay bounded and the policy keeps exploring.
    if (opts.weight_decay > 0.0) {
      const double shrink = 1.0 - opts.lr * opts.weight_decay;
      for (double& v : w) v *= shrink;
    }

    for (double v : b) {
      if (!std::isfinite(v)) {
        throw NumericalError("train_reinforce: policy diverged at episode " +
                             std::to_string(episode));
      }
    }
    for (double v : w) {
      if (!std::isfinite(v)) {
        throw NumericalError("train_reinforce: policy diverged at episode " +
                             std::to_string(episode));
      }
    }
  }

  // Fold the feature means into the bias: b_raw = b − w·mu reproduces the
  // trained logits on raw observations.
  if (opts.episodes > 0) {
    std::vector<double>& pw = policy.weights();
    std::vector<double>& pb = policy.bias();
    for (int a = 0; a < n_actions; ++a) {
      const double* row = w.data() + static_cast<std::size_t>(a) * obs_dim;
      double dot = 0.0;
      for (int i = 0; i < obs_dim; ++i) dot += row[i] * mu[static_cast<std::size_t>(i)];
      pb[static_cast<std::size_t>(a)] = b[static_cast<std::size_t>(a)] - dot;
    }
    pw = w;
  }

  result.policy = std::move(policy);
  return result;
}

PolicyFn sampling_policy(SoftmaxPolicy policy) {
  return [policy = std::move(policy)](const FireSuppressionEnv&, const EnvState& state,
                                      const Observation& obs) {
    const RngKey key{state.seed, static_cast<std::uint64_t>(state.step), state.stream};
    return policy.act(obs, key);
  };
}

}  // namespace emberline
