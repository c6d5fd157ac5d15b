#include "smoothq/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace smoothq::envs {

double wrap_mod(double a, double b) {
  double r = std::fmod(a, b);
  if (r < 0.0) r += b;
  // r + b can round up to exactly b for tiny negative r.
  if (r >= b) r = 0.0;
  return r;
}

StepResult<GridState> grid_step(GridState s, GridAction a, int size) {
  const int last = size - 1;
  GridState next{std::min(std::max(s.x + a.ax, 0), last), std::min(std::max(s.y + a.ay, 0), last)};
  // Reward is paid on arrival; the goal is absorbing so the departure reading never pays out.
  const bool at_goal = next.x == last && next.y == last;
  return {next, at_goal ? 100.0 : -1.0, at_goal};
}

StepResult<PendulumState> pendulum_step(PendulumState s, double u, bool standard_integrator) {
  using namespace pendulum_constants;
  if (!(u >= -kMaxTorque && u <= kMaxTorque)) {
    throw std::invalid_argument("pendulum_step: torque " + std::to_string(u) + " outside [-2, 2]");
  }
  const double gravity_term = 3.0 * kGravity / (2.0 * kLength) * std::sin(s.theta);
  const double torque_term = 3.0 * u / (kMass * kLength * kLength);
  double omega = standard_integrator ? s.omega + (-gravity_term + torque_term) * kDt
                                     : (s.omega - gravity_term + torque_term) * kDt;
  omega = std::min(std::max(omega, -kMaxSpeed), kMaxSpeed);
  const double pi = std::numbers::pi;
  const double theta = wrap_mod(s.theta + kDt * omega + pi, 2.0 * pi) - pi;
  const double reward = -s.theta * s.theta - s.omega * s.omega - 0.001 * u * u;
  return {{theta, omega}, reward, false};
}

StepResult<MountainCarState> mountaincar_step(MountainCarState s, double u) {
  using namespace mountaincar_constants;
  if (!(u >= -1.0 && u <= 1.0)) {
    throw std::invalid_argument("mountaincar_step: action " + std::to_string(u) + " outside [-1, 1]");
  }
  double v = s.v + kPower * u - std::cos(3.0 * s.p) / 400.0;
  v = std::min(std::max(v, -kMaxSpeed), kMaxSpeed);
  const double p = std::min(std::max(s.p + v, kMinPosition), kMaxPosition);
  const bool goal = p >= kGoalPosition;
  const double reward = (goal ? 100.0 : 20.0 * p) - 0.1 * u * u;
  return {{p, v}, reward, goal};
}

double action_level(const ActionGrid& grid, std::size_t i) {
  if (grid.count < 2) throw std::invalid_argument("action_level: grid needs at least 2 levels");
  if (i >= grid.count) {
    throw std::out_of_range("action_level: index " + std::to_string(i) + " >= " +
                            std::to_string(grid.count));
  }
  // Multiply before dividing so the last level lands exactly on hi.
  return grid.lo + (grid.hi - grid.lo) * static_cast<double>(i) / static_cast<double>(grid.count - 1);
}

std::vector<double> encode_state(GridState s, int size) {
  const double last = static_cast<double>(size - 1);
  return {s.x / last, s.y / last};
}

std::vector<double> encode_state(PendulumState s) {
  return {std::cos(s.theta), std::sin(s.theta), s.omega / pendulum_constants::kMaxSpeed};
}

std::vector<double> encode_state(MountainCarState s) {
  return {(s.p + 0.3) / 0.9, s.v / mountaincar_constants::kMaxSpeed};
}

GridState reset_grid() { return {0, 0}; }

PendulumState reset_pendulum(Rng& rng) {
  const double pi = std::numbers::pi;
  const double theta = rng.uniform(-pi, pi);
  const double omega = rng.uniform(-1.0, 1.0);
  return {theta, omega};
}

MountainCarState reset_mountaincar(Rng& rng) {
  return {rng.uniform(-0.6, -0.4), 0.0};
}

GridWorld::GridWorld(int size, std::size_t step_cap) : size_(size), step_cap_(step_cap) {
  if (size < 2) throw std::invalid_argument("GridWorld: size must be at least 2");
  if (step_cap == 0) throw std::invalid_argument("GridWorld: step cap must be positive");
}

StepResult<GridState> GridWorld::step(const GridState& s, std::size_t action) const {
  return grid_step(s, kGridActions.at(action), size_);
}

double GridWorld::action_distance(std::size_t i, std::size_t j) const {
  const GridAction& a = kGridActions.at(i);
  const GridAction& b = kGridActions.at(j);
  return std::hypot(static_cast<double>(a.ax - b.ax), static_cast<double>(a.ay - b.ay));
}

double GridWorld::state_distance(std::size_t i, std::size_t j) const {
  const GridState a = state_at(i);
  const GridState b = state_at(j);
  return std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

Pendulum::Pendulum(std::size_t levels, std::size_t episode_steps, bool standard_integrator)
    : grid_{-pendulum_constants::kMaxTorque, pendulum_constants::kMaxTorque, levels},
      episode_steps_(episode_steps),
      standard_integrator_(standard_integrator) {
  if (levels < 2) throw std::invalid_argument("Pendulum: need at least 2 action levels");
  if (episode_steps == 0) throw std::invalid_argument("Pendulum: episode length must be positive");
}

StepResult<PendulumState> Pendulum::step(const PendulumState& s, std::size_t action) const {
  return pendulum_step(s, action_level(grid_, action), standard_integrator_);
}

double Pendulum::action_distance(std::size_t i, std::size_t j) const {
  return std::abs(action_level(grid_, i) - action_level(grid_, j));
}

MountainCar::MountainCar(std::size_t levels, std::size_t step_cap)
    : grid_{-1.0, 1.0, levels}, step_cap_(step_cap) {
  if (levels < 2) throw std::invalid_argument("MountainCar: need at least 2 action levels");
  if (step_cap == 0) throw std::invalid_argument("MountainCar: step cap must be positive");
}

StepResult<MountainCarState> MountainCar::step(const MountainCarState& s, std::size_t action) const {
  return mountaincar_step(s, action_level(grid_, action));
}

double MountainCar::action_distance(std::size_t i, std::size_t j) const {
  return std::abs(action_level(grid_, i) - action_level(grid_, j));
}

}  // namespace smoothq::envs
