#pragma once

// The three benchmark MDPs: a square gridworld, a torque-limited pendulum and
// the mountain car. Each environment is a pure transition function over a
// caller-owned state value.

#include <array>
#include <cstddef>
#include <vector>

#include "smoothq/rng.hpp"

namespace smoothq::envs {

inline constexpr int kGridSize = 64;
inline constexpr std::size_t kGridStepCap = 20000;
inline constexpr std::size_t kPendulumEpisodeSteps = 200;
inline constexpr std::size_t kMountainCarStepCap = 200;
inline constexpr std::size_t kDefaultActionLevels = 64;

struct GridState {
  int x = 0;
  int y = 0;
  friend bool operator==(const GridState&, const GridState&) = default;
};

struct GridAction {
  int ax = 0;
  int ay = 0;
  friend bool operator==(const GridAction&, const GridAction&) = default;
};

/// Action index -> move. Index order is part of the reproducibility contract.
inline constexpr std::array<GridAction, 4> kGridActions{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};

struct PendulumState {
  double theta = 0.0;  // rad, [-pi, pi)
  double omega = 0.0;  // rad/s, [-8, 8]
};

struct MountainCarState {
  double p = 0.0;  // [-1.2, 0.6]
  double v = 0.0;  // [-0.07, 0.07]
};

template <class State>
struct StepResult {
  State next_state;
  double reward = 0.0;
  bool terminal = false;
};

/// Evenly spaced discretization of a scalar action interval.
struct ActionGrid {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t count = kDefaultActionLevels;

  /// Distance between adjacent levels.
  double spacing() const { return (hi - lo) / static_cast<double>(count - 1); }
};

namespace pendulum_constants {
inline constexpr double kGravity = 10.0;
inline constexpr double kMass = 1.0;
inline constexpr double kLength = 1.0;
inline constexpr double kDt = 0.05;
inline constexpr double kMaxSpeed = 8.0;
inline constexpr double kMaxTorque = 2.0;
}  // namespace pendulum_constants

namespace mountaincar_constants {
inline constexpr double kMinPosition = -1.2;
inline constexpr double kMaxPosition = 0.6;
inline constexpr double kMaxSpeed = 0.07;
inline constexpr double kGoalPosition = 0.45;
inline constexpr double kPower = 0.0015;
}  // namespace mountaincar_constants

/// a mod b with the result in [0, b), for any real a and b > 0.
double wrap_mod(double a, double b);

StepResult<GridState> grid_step(GridState s, GridAction a, int size = kGridSize);

/// `standard_integrator` switches to omega' = omega + (-(3g/2l) sin theta + 3u/(ml^2)) dt.
/// Off by default: the printed form scales the whole bracket (omega included) by dt.
StepResult<PendulumState> pendulum_step(PendulumState s, double u, bool standard_integrator = false);

StepResult<MountainCarState> mountaincar_step(MountainCarState s, double u);

/// lo + (hi - lo) / (count - 1) * i. Throws std::out_of_range for i >= count.
double action_level(const ActionGrid& grid, std::size_t i);

std::vector<double> encode_state(GridState s, int size = kGridSize);
std::vector<double> encode_state(PendulumState s);
std::vector<double> encode_state(MountainCarState s);

GridState reset_grid();
PendulumState reset_pendulum(Rng& rng);
MountainCarState reset_mountaincar(Rng& rng);

// Episode-level adapters used by the learners and the harness. They bundle a
// transition function with its discrete action set, feature encoding and
// step cap.

class GridWorld {
 public:
  using State = GridState;

  explicit GridWorld(int size = kGridSize, std::size_t step_cap = kGridStepCap);

  State reset(Rng&) const { return reset_grid(); }
  StepResult<State> step(const State& s, std::size_t action) const;
  std::vector<double> features(const State& s) const { return encode_state(s, size_); }
  std::size_t feature_dim() const { return 2; }
  std::size_t action_count() const { return kGridActions.size(); }
  /// Euclidean distance between the (ax, ay) vectors of two actions.
  double action_distance(std::size_t i, std::size_t j) const;
  std::size_t step_cap() const { return step_cap_; }

  int size() const { return size_; }
  std::size_t state_count() const { return static_cast<std::size_t>(size_) * size_; }
  /// x * size + y.
  std::size_t state_index(const State& s) const {
    return static_cast<std::size_t>(s.x) * size_ + static_cast<std::size_t>(s.y);
  }
  State state_at(std::size_t index) const {
    return {static_cast<int>(index / size_), static_cast<int>(index % size_)};
  }
  double state_distance(std::size_t i, std::size_t j) const;
  State goal() const { return {size_ - 1, size_ - 1}; }

 private:
  int size_;
  std::size_t step_cap_;
};

class Pendulum {
 public:
  using State = PendulumState;

  explicit Pendulum(std::size_t levels = kDefaultActionLevels,
                    std::size_t episode_steps = kPendulumEpisodeSteps,
                    bool standard_integrator = false);

  State reset(Rng& rng) const { return reset_pendulum(rng); }
  StepResult<State> step(const State& s, std::size_t action) const;
  std::vector<double> features(const State& s) const { return encode_state(s); }
  std::size_t feature_dim() const { return 3; }
  std::size_t action_count() const { return grid_.count; }
  double action_distance(std::size_t i, std::size_t j) const;
  std::size_t step_cap() const { return episode_steps_; }
  const ActionGrid& action_grid() const { return grid_; }

 private:
  ActionGrid grid_;
  std::size_t episode_steps_;
  bool standard_integrator_;
};

class MountainCar {
 public:
  using State = MountainCarState;

  explicit MountainCar(std::size_t levels = kDefaultActionLevels,
                       std::size_t step_cap = kMountainCarStepCap);

  State reset(Rng& rng) const { return reset_mountaincar(rng); }
  StepResult<State> step(const State& s, std::size_t action) const;
  std::vector<double> features(const State& s) const { return encode_state(s); }
  std::size_t feature_dim() const { return 2; }
  std::size_t action_count() const { return grid_.count; }
  double action_distance(std::size_t i, std::size_t j) const;
  std::size_t step_cap() const { return step_cap_; }
  const ActionGrid& action_grid() const { return grid_; }

 private:
  ActionGrid grid_;
  std::size_t step_cap_;
};

}  // namespace smoothq::envs
