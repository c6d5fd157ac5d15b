#pragma once

// Deep Q-learning with replay memory, a periodically synchronized target
// network and an auxiliary loss that pulls the outputs of neighboring actions
// toward the same TD target. With beta = 0 it is plain Nature DQN.

#include <Eigen/Dense>

#include <cstddef>
#include <deque>
#include <vector>

#include "smoothq/mlp.hpp"
#include "smoothq/neighbors.hpp"
#include "smoothq/records.hpp"
#include "smoothq/rng.hpp"

namespace smoothq::dqn {

struct Transition {
  Eigen::VectorXd state;
  std::size_t action = 0;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool terminal = false;
};

/// Fixed-capacity FIFO of transitions. Index 0 is the oldest element.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return storage_.empty(); }
  const Transition& operator[](std::size_t i) const { return storage_[i]; }

 private:
  std::size_t capacity_;
  std::deque<Transition> storage_;
};

/// Uniform sampling with replacement. Throws std::length_error when the buffer
/// holds fewer than batch_size transitions.
std::vector<Transition> sample_minibatch(const ReplayBuffer& buffer, std::size_t batch_size, Rng& rng);

struct DqnHyperParams {
  double alpha = 1e-4;  // the loss is a sum over the batch, not a mean
  double gamma = 0.99;
  double epsilon = 0.1;
  double beta = 0.0;
  double delta_a = 0.0;
  std::size_t target_sync = 500;  // C
  std::size_t capacity = 50'000;  // N
  std::size_t batch_size = 64;
  std::size_t warmup_steps = 1000;

  /// Transitions required before the first gradient step.
  std::size_t warmup() const { return warmup_steps > batch_size ? warmup_steps : batch_size; }
  void validate() const;
};

/// r + gamma * max_a' target(s_next, a'), or r alone on a terminal transition.
double compute_target(const Transition& t, const mlp::MlpParams& target_params, double gamma);

/// sum_j (q_j - Q(s_j, a_j))^2
double loss_l0(const std::vector<Transition>& batch, const mlp::MlpParams& params,
               const std::vector<double>& targets);

/// beta * sum_j sum_{a' in N(a_j)} (q_j - Q(s_j, a'))^2
double loss_l1(const std::vector<Transition>& batch, const mlp::MlpParams& params,
               const std::vector<double>& targets, double beta, const ActionNeighborhoods& neighborhoods);

struct LossValues {
  double l0 = 0.0;
  double l1 = 0.0;
};

class DqnAgent {
 public:
  DqnAgent(std::vector<mlp::LayerSpec> architecture, DqnHyperParams params, ActionNeighborhoods neighborhoods,
           Rng& init_rng);

  /// Epsilon-greedy over the online network, smallest index on ties.
  std::size_t act(const Eigen::VectorXd& features, double epsilon, Rng& rng) const;

  /// Gradient of l0 + l1 over `batch` with respect to the online parameters,
  /// added into `grads`. Targets come from the target network.
  LossValues accumulate_gradient(const std::vector<Transition>& batch, mlp::GradAccumulator& grads) const;

  /// One gradient-descent step on l0 + l1 over `batch`, with targets from the
  /// target network. Returns the losses measured before the step.
  LossValues train_step(const std::vector<Transition>& batch);

  void sync_target() { target_ = online_; }

  /// Stores `t`, then (after warmup) samples a minibatch and trains on it.
  /// Every `target_sync` calls the target network is refreshed.
  void observe(Transition t, Rng& rng);

  const mlp::MlpParams& online() const { return online_; }
  mlp::MlpParams& online() { return online_; }
  const mlp::MlpParams& target() const { return target_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const DqnHyperParams& params() const { return params_; }
  const ActionNeighborhoods& neighborhoods() const { return neighborhoods_; }
  std::size_t steps() const { return steps_; }
  std::size_t action_count() const { return online_.output_dim(); }

 private:
  DqnHyperParams params_;
  ActionNeighborhoods neighborhoods_;
  mlp::MlpParams online_;
  mlp::MlpParams target_;
  ReplayBuffer buffer_;
  std::size_t steps_ = 0;
  mlp::GradAccumulator grads_;
};

/// Index of the largest entry, smallest index on ties.
std::size_t argmax(const Eigen::VectorXd& values);

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// One episode of acting and learning until terminal or the step cap.
template <class Env>
EpisodeRecord run_episode(const Env& env, DqnAgent& agent, Rng& rng) {
  EpisodeRecord record;
  typename Env::State state = env.reset(rng);
  Eigen::VectorXd features = to_eigen(env.features(state));
  while (record.steps < env.step_cap()) {
    const std::size_t a = agent.act(features, agent.params().epsilon, rng);
    const auto result = env.step(state, a);
    Transition t{features, a, result.reward, to_eigen(env.features(result.next_state)), result.terminal};
    features = t.next_state;
    agent.observe(std::move(t), rng);
    record.steps += 1;
    record.ret += result.reward;
    state = result.next_state;
    if (result.terminal) break;
  }
  return record;
}

}  // namespace smoothq::dqn
