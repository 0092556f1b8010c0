// Minimal policy-gradient smoke trainer: a linear softmax policy over the
// flattened observation, trained with episodic REINFORCE. Returns-to-go are
// scored against a running mean return kept per timestep and normalized by a
// running standard deviation, features are mean-centered on the fly (the
// shift is folded back into the bias when training ends), and L2 weight decay
// bounds the logits so the softmax keeps exploring instead of collapsing into
// a deterministic policy. Desk-scale substitute for a full PPO setup.
#pragma once

#include <cstdint>
#include <vector>

#include "emberline/rl_env.hpp"
#include "emberline/rng.hpp"

namespace emberline {

class SoftmaxPolicy {
 public:
  SoftmaxPolicy() = default;
  // Zero-initialized weights: the untrained policy is uniform over actions.
  explicit SoftmaxPolicy(int obs_dim, int n_actions = kActionCount);

  int obs_dim() const { return obs_dim_; }
  int n_actions() const { return n_actions_; }

  std::vector<double> action_probabilities(const Observation& obs) const;
  // Samples from the policy distribution using the key's policy draw domain.
  Action act(const Observation& obs, const RngKey& key) const;
  Action greedy(const Observation& obs) const;

  std::vector<double>& weights() { return w_; }        // n_actions x obs_dim, row-major
  const std::vector<double>& weights() const { return w_; }
  std::vector<double>& bias() { return b_; }
  const std::vector<double>& bias() const { return b_; }

 private:
  int obs_dim_ = 0;
  int n_actions_ = 0;
  std::vector<double> w_;
  std::vector<double> b_;
};

struct ReinforceOptions {
  int episodes = 2000;
  double lr = 0.005;
  double discount = 0.98;
  // L2 penalty on the policy weights, applied once per episode as a
  // multiplicative shrink (1 - lr * weight_decay). Bounds the logits so the
  // softmax keeps exploring; 0 disables the protection.
  double weight_decay = 0.3;
  std::uint64_t seed = 1;
  std::uint64_t first_stream = 0;  // episode e runs on stream first_stream + e
};

struct ReinforceResult {
  SoftmaxPolicy policy;
  std::vector<double> returns;  // undiscounted per-episode return, one entry per episode
};

// Episodic REINFORCE on the given environment, deterministic for a fixed
// (policy init, options). Throws NumericalError if the policy parameters stop
// being finite, naming the episode.
ReinforceResult train_reinforce(const FireSuppressionEnv& env, SoftmaxPolicy policy,
                                const ReinforceOptions& opts);

// Wraps a policy for run_batch_episodes; samples with the episode's own key.
PolicyFn sampling_policy(SoftmaxPolicy policy);

}  // namespace emberline
