#pragma once

#include <cstddef>
#include <vector>

namespace smoothq {

/// Actions a' != a whose action values lie within delta of a's, ascending.
/// The distance is taken between action values (move vectors or torque
/// levels), never between indices.
template <class Env>
std::vector<std::size_t> action_neighbors(const Env& env, std::size_t a, double delta) {
  std::vector<std::size_t> out;
  for (std::size_t other = 0; other < env.action_count(); ++other) {
    if (other != a && env.action_distance(a, other) <= delta) out.push_back(other);
  }
  return out;
}

/// action_neighbors for every action of the environment.
using ActionNeighborhoods = std::vector<std::vector<std::size_t>>;

template <class Env>
ActionNeighborhoods action_neighborhoods(const Env& env, double delta) {
  ActionNeighborhoods out(env.action_count());
  for (std::size_t a = 0; a < env.action_count(); ++a) out[a] = action_neighbors(env, a, delta);
  return out;
}

}  // namespace smoothq
