#include "smoothq/tabular.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace smoothq::tabular {

QTable::QTable(std::size_t state_count, std::size_t action_count)
    : state_count_(state_count), action_count_(action_count), values_(state_count * action_count, 0.0) {
  if (state_count == 0 || action_count == 0) throw std::invalid_argument("QTable: empty dimension");
}

bool bitwise_equal(const QTable& a, const QTable& b) {
  if (a.state_count() != b.state_count() || a.action_count() != b.action_count()) return false;
  return std::memcmp(a.values().data(), b.values().data(), a.values().size() * sizeof(double)) == 0;
}

void TabularHyperParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("tabular hyperparameter out of range: ") + what);
  };
  require(alpha > 0.0 && alpha <= 1.0, "alpha must be in (0, 1]");
  require(gamma >= 0.0 && gamma <= 1.0, "gamma must be in [0, 1]");
  require(epsilon >= 0.0 && epsilon <= 1.0, "epsilon must be in [0, 1]");
  require(delta_s >= 0.0, "delta_s must be >= 0");
  require(delta_a >= 0.0, "delta_a must be >= 0");
  require(beta_s >= 0.0 && beta_s <= 1.0, "beta_s must be in [0, 1]");
  require(beta_a >= 0.0 && beta_a <= 1.0, "beta_a must be in [0, 1]");
}

std::size_t greedy_action(const QTable& q, std::size_t s) {
  const auto row = q.row(s);
  std::size_t best = 0;
  for (std::size_t a = 1; a < row.size(); ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

std::size_t epsilon_greedy(const QTable& q, std::size_t s, double epsilon, Rng& rng) {
  if (rng.bernoulli(epsilon)) return rng.uniform_index(q.action_count());
  return greedy_action(q, s);
}

double td_target(double r, const QTable& q, std::size_t s_next, double gamma, bool terminal) {
  if (terminal) return r;
  return r + gamma * q(s_next, greedy_action(q, s_next));
}

void classic_update(QTable& q, std::size_t s, std::size_t a, double target, double alpha) {
  double& v = q(s, a);
  v = v + alpha * (target - v);
}

StateNeighborhood::StateNeighborhood(const envs::GridWorld& env, double delta_s) : size_(env.size()) {
  if (!(delta_s >= 0.0)) throw std::invalid_argument("StateNeighborhood: delta_s must be >= 0");
  // Offsets further than the grid diagonal can never land inside it.
  const int reach = static_cast<int>(std::min(std::floor(delta_s), static_cast<double>(size_ - 1)));
  for (int dx = -reach; dx <= reach; ++dx) {
    for (int dy = -reach; dy <= reach; ++dy) {
      if (dx == 0 && dy == 0) continue;
      if (std::hypot(static_cast<double>(dx), static_cast<double>(dy)) <= delta_s) offsets_.push_back({dx, dy});
    }
  }
}

void StateNeighborhood::neighbors(std::size_t s, std::vector<std::size_t>& out) const {
  out.clear();
  const int x = static_cast<int>(s / size_);
  const int y = static_cast<int>(s % size_);
  // offsets_ is sorted by (dx, dy), so indices x*size+y come out ascending.
  for (const Offset& o : offsets_) {
    const int nx = x + o.dx;
    const int ny = y + o.dy;
    if (nx < 0 || ny < 0 || nx >= size_ || ny >= size_) continue;
    out.push_back(static_cast<std::size_t>(nx) * size_ + static_cast<std::size_t>(ny));
  }
}

std::vector<std::size_t> state_neighbors(const envs::GridWorld& env, std::size_t s, double delta_s) {
  if (s >= env.state_count()) throw std::out_of_range("state_neighbors: state index out of range");
  std::vector<std::size_t> out;
  StateNeighborhood(env, delta_s).neighbors(s, out);
  return out;
}

void smooth_state_update(QTable& q, std::span<const std::size_t> neighbors, std::size_t a,
                         double target, const TabularHyperParams& params) {
  for (std::size_t s2 : neighbors) {
    double& v = q(s2, a);
    const double blended = (1.0 - params.beta_s) * v + params.beta_s * target;
    v = v + params.alpha * (blended - v);
  }
}

void smooth_action_update(QTable& q, std::size_t s, std::span<const std::size_t> neighbors,
                          double target, const TabularHyperParams& params) {
  for (std::size_t a2 : neighbors) {
    double& v = q(s, a2);
    const double blended = (1.0 - params.beta_a) * v + params.beta_a * target;
    v = v + params.alpha * (blended - v);
  }
}

EpisodeRecord train_episode(const envs::GridWorld& env, QTable& q, const TabularHyperParams& params,
                            SmoothMode mode, Rng& rng, const StepHook& hook) {
  if (q.state_count() != env.state_count() || q.action_count() != env.action_count()) {
    throw std::invalid_argument("train_episode: table shape does not match the environment");
  }
  const bool smooth_states = mode == SmoothMode::kState || mode == SmoothMode::kBoth;
  const bool smooth_actions = mode == SmoothMode::kAction || mode == SmoothMode::kBoth;

  const StateNeighborhood state_hood(env, smooth_states ? params.delta_s : 0.0);
  std::vector<std::vector<std::size_t>> action_hood(env.action_count());
  if (smooth_actions) {
    for (std::size_t a = 0; a < env.action_count(); ++a) action_hood[a] = action_neighbors(env, a, params.delta_a);
  }

  EpisodeRecord record;
  std::vector<std::size_t> scratch;
  envs::GridState state = env.reset(rng);
  while (record.steps < env.step_cap()) {
    const std::size_t s = env.state_index(state);
    const std::size_t a = epsilon_greedy(q, s, params.epsilon, rng);
    const auto result = env.step(state, a);
    const std::size_t s_next = env.state_index(result.next_state);

    const double target = td_target(result.reward, q, s_next, params.gamma, result.terminal);
    classic_update(q, s, a, target, params.alpha);
    if (smooth_states) {
      state_hood.neighbors(s, scratch);
      smooth_state_update(q, scratch, a, target, params);
    }
    if (smooth_actions) smooth_action_update(q, s, action_hood[a], target, params);

    record.steps += 1;
    record.ret += result.reward;
    if (hook) hook(q);
    state = result.next_state;
    if (result.terminal) break;
  }
  return record;
}

std::optional<std::size_t> greedy_path_length(const envs::GridWorld& env, const QTable& q,
                                              std::size_t max_steps) {
  envs::GridState state = envs::reset_grid();
  for (std::size_t steps = 1; steps <= max_steps; ++steps) {
    const auto result = env.step(state, greedy_action(q, env.state_index(state)));
    if (result.terminal) return steps;
    state = result.next_state;
  }
  return std::nullopt;
}

}  // namespace smoothq::tabular
