#pragma once

// Tabular Q-learning with optional synchronous updates of similar states
// (same action, nearby states) and similar actions (same state, nearby
// actions).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "smoothq/envs.hpp"
#include "smoothq/neighbors.hpp"
#include "smoothq/records.hpp"
#include "smoothq/rng.hpp"

namespace smoothq::tabular {

/// Dense row-major table of action values, zero-initialized.
class QTable {
 public:
  QTable(std::size_t state_count, std::size_t action_count);

  double& operator()(std::size_t s, std::size_t a) { return values_[s * action_count_ + a]; }
  double operator()(std::size_t s, std::size_t a) const { return values_[s * action_count_ + a]; }

  std::span<const double> row(std::size_t s) const {
    return {values_.data() + s * action_count_, action_count_};
  }
  std::span<double> row(std::size_t s) { return {values_.data() + s * action_count_, action_count_}; }

  std::size_t state_count() const { return state_count_; }
  std::size_t action_count() const { return action_count_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t state_count_;
  std::size_t action_count_;
  std::vector<double> values_;
};

/// True when both tables have the same shape and identical bit patterns.
bool bitwise_equal(const QTable& a, const QTable& b);

struct TabularHyperParams {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon = 0.1;
  double delta_s = 1.0;
  double delta_a = 1.5;
  double beta_s = 0.0;
  double beta_a = 0.0;

  /// Throws std::invalid_argument naming the first out-of-range field.
  void validate() const;
};

/// Which synchronous neighbor updates run after the classic update.
enum class SmoothMode { kNone, kState, kAction, kBoth };

/// Smallest action index attaining the row maximum.
std::size_t greedy_action(const QTable& q, std::size_t s);

std::size_t epsilon_greedy(const QTable& q, std::size_t s, double epsilon, Rng& rng);

/// r + gamma * max_a Q(s_next, a), or r alone on a terminal transition.
double td_target(double r, const QTable& q, std::size_t s_next, double gamma, bool terminal);

/// Q(s,a) += alpha * (target - Q(s,a)).
void classic_update(QTable& q, std::size_t s, std::size_t a, double target, double alpha);

/// Gridworld states s' != s with Euclidean distance <= delta_s.
/// Ascending index order.
std::vector<std::size_t> state_neighbors(const envs::GridWorld& env, std::size_t s, double delta_s);

using smoothq::action_neighbors;

/// State neighborhoods for a fixed radius. The lattice offsets are computed once
/// and clipped against the grid boundary per query.
class StateNeighborhood {
 public:
  StateNeighborhood(const envs::GridWorld& env, double delta_s);
  void neighbors(std::size_t s, std::vector<std::size_t>& out) const;

 private:
  struct Offset {
    int dx;
    int dy;
  };
  int size_;
  std::vector<Offset> offsets_;
};

/// For each s' in `neighbors`: q' = (1 - beta_s) Q(s',a) + beta_s target; Q(s',a) += alpha (q' - Q(s',a)).
void smooth_state_update(QTable& q, std::span<const std::size_t> neighbors, std::size_t a,
                         double target, const TabularHyperParams& params);

/// For each a' in `neighbors`: q' = (1 - beta_a) Q(s,a') + beta_a target; Q(s,a') += alpha (q' - Q(s,a')).
void smooth_action_update(QTable& q, std::size_t s, std::span<const std::size_t> neighbors,
                          double target, const TabularHyperParams& params);

/// Called with the table after every environment step.
using StepHook = std::function<void(const QTable&)>;

/// One episode from (0,0) until the goal or the step cap. Returns steps and
/// undiscounted return; the caller fills in episode index, timing and seed.
EpisodeRecord train_episode(const envs::GridWorld& env, QTable& q, const TabularHyperParams& params,
                            SmoothMode mode, Rng& rng, const StepHook& hook = {});

/// Steps taken by the greedy policy from (0,0) to the goal, or nullopt if it
/// does not arrive within `max_steps`.
std::optional<std::size_t> greedy_path_length(const envs::GridWorld& env, const QTable& q,
                                              std::size_t max_steps);

}  // namespace smoothq::tabular
