#include "smoothq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smoothq {

tabular::QTable value_iteration_oracle(int grid_size, double gamma, double tolerance) {
  if (grid_size < 2 || grid_size > envs::kGridSize) {
    throw std::invalid_argument("value_iteration_oracle: grid size must be in [2, 64]");
  }
  if (!(tolerance > 0.0)) throw std::invalid_argument("value_iteration_oracle: tolerance must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("value_iteration_oracle: gamma must be in [0, 1]");

  const envs::GridWorld env(grid_size);
  const std::size_t goal = env.state_index(env.goal());
  tabular::QTable q(env.state_count(), env.action_count());
  std::vector<double> best(env.state_count(), 0.0);

  constexpr int kMaxSweeps = 1'000'000;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    for (std::size_t s = 0; s < env.state_count(); ++s) {
      const auto row = q.row(s);
      best[s] = *std::max_element(row.begin(), row.end());
    }
    double max_change = 0.0;
    for (std::size_t s = 0; s < env.state_count(); ++s) {
      if (s == goal) continue;
      for (std::size_t a = 0; a < env.action_count(); ++a) {
        const auto result = env.step(env.state_at(s), a);
        const double backup = result.terminal
                                  ? result.reward
                                  : result.reward + gamma * best[env.state_index(result.next_state)];
        max_change = std::max(max_change, std::abs(backup - q(s, a)));
        q(s, a) = backup;
      }
    }
    if (max_change < tolerance) return q;
  }
  throw std::runtime_error("value_iteration_oracle: no convergence");
}

}  // namespace smoothq
