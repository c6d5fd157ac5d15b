#include "smoothq/dqn.hpp"

#include <stdexcept>
#include <string>

namespace smoothq::dqn {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (storage_.size() == capacity_) storage_.pop_front();
  storage_.push_back(std::move(t));
}

std::vector<Transition> sample_minibatch(const ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) {
  if (buffer.size() < batch_size || batch_size == 0) {
    throw std::length_error("sample_minibatch: buffer holds " + std::to_string(buffer.size()) +
                            " transitions, batch needs " + std::to_string(batch_size));
  }
  std::vector<Transition> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) batch.push_back(buffer[rng.uniform_index(buffer.size())]);
  return batch;
}

void DqnHyperParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("dqn hyperparameter out of range: ") + what);
  };
  require(alpha > 0.0, "alpha must be positive");
  require(gamma >= 0.0 && gamma <= 1.0, "gamma must be in [0, 1]");
  require(epsilon >= 0.0 && epsilon <= 1.0, "epsilon must be in [0, 1]");
  require(beta >= 0.0, "beta must be >= 0");
  require(delta_a >= 0.0, "delta_a must be >= 0");
  require(target_sync > 0, "target sync period must be positive");
  require(capacity > 0, "replay capacity must be positive");
  require(batch_size > 0, "batch size must be positive");
  require(warmup() <= capacity, "warmup must not exceed replay capacity");
}

std::size_t argmax(const Eigen::VectorXd& values) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  }
  return best;
}

double compute_target(const Transition& t, const mlp::MlpParams& target_params, double gamma) {
  if (t.terminal) return t.reward;
  const Eigen::VectorXd next_q = mlp::forward(target_params, t.next_state);
  return t.reward + gamma * next_q(static_cast<Eigen::Index>(argmax(next_q)));
}

double loss_l0(const std::vector<Transition>& batch, const mlp::MlpParams& params,
               const std::vector<double>& targets) {
  if (targets.size() != batch.size()) throw std::invalid_argument("loss_l0: targets do not match batch");
  double loss = 0.0;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Eigen::VectorXd q = mlp::forward(params, batch[j].state);
    const double err = targets[j] - q(static_cast<Eigen::Index>(batch[j].action));
    loss += err * err;
  }
  return loss;
}

double loss_l1(const std::vector<Transition>& batch, const mlp::MlpParams& params,
               const std::vector<double>& targets, double beta, const ActionNeighborhoods& neighborhoods) {
  if (targets.size() != batch.size()) throw std::invalid_argument("loss_l1: targets do not match batch");
  double loss = 0.0;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Eigen::VectorXd q = mlp::forward(params, batch[j].state);
    for (std::size_t other : neighborhoods.at(batch[j].action)) {
      const double err = targets[j] - q(static_cast<Eigen::Index>(other));
      loss += err * err;
    }
  }
  return beta * loss;
}

DqnAgent::DqnAgent(std::vector<mlp::LayerSpec> architecture, DqnHyperParams params,
                   ActionNeighborhoods neighborhoods, Rng& init_rng)
    : params_(params),
      neighborhoods_(std::move(neighborhoods)),
      online_(mlp::init_params(architecture, init_rng)),
      target_(online_),
      buffer_(params.capacity),
      grads_(online_) {
  params_.validate();
  if (neighborhoods_.size() != online_.output_dim()) {
    throw std::invalid_argument("DqnAgent: neighborhoods cover " + std::to_string(neighborhoods_.size()) +
                                " actions, network has " + std::to_string(online_.output_dim()) + " outputs");
  }
}

std::size_t DqnAgent::act(const Eigen::VectorXd& features, double epsilon, Rng& rng) const {
  if (rng.bernoulli(epsilon)) return rng.uniform_index(action_count());
  return argmax(mlp::forward(online_, features));
}

LossValues DqnAgent::accumulate_gradient(const std::vector<Transition>& batch, mlp::GradAccumulator& grads) const {
  LossValues losses;
  mlp::ForwardCache cache;
  const auto n_actions = static_cast<Eigen::Index>(action_count());
  Eigen::VectorXd error(n_actions);
  for (const Transition& t : batch) {
    const double q_target = compute_target(t, target_, params_.gamma);
    const Eigen::VectorXd& q = mlp::forward(online_, t.state, cache);
    const auto a = static_cast<Eigen::Index>(t.action);
    error.setZero();
    // d/dQ of (q_target - Q)^2 is 2 (Q - q_target).
    const double taken = q(a) - q_target;
    error(a) = 2.0 * taken;
    losses.l0 += taken * taken;
    double neighbor_sq = 0.0;
    for (std::size_t other : neighborhoods_.at(t.action)) {
      const auto o = static_cast<Eigen::Index>(other);
      const double diff = q(o) - q_target;
      error(o) = 2.0 * params_.beta * diff;
      neighbor_sq += diff * diff;
    }
    losses.l1 += params_.beta * neighbor_sq;
    mlp::backward(online_, cache, error, grads);
  }
  return losses;
}

LossValues DqnAgent::train_step(const std::vector<Transition>& batch) {
  grads_.zero();
  const LossValues losses = accumulate_gradient(batch, grads_);
  mlp::apply_update(online_, grads_, params_.alpha);
  return losses;
}

void DqnAgent::observe(Transition t, Rng& rng) {
  buffer_.push(std::move(t));
  ++steps_;
  if (buffer_.size() >= params_.warmup()) train_step(sample_minibatch(buffer_, params_.batch_size, rng));
  if (steps_ % params_.target_sync == 0) sync_target();
}

}  // namespace smoothq::dqn
