#pragma once

#include "smoothq/tabular.hpp"

namespace smoothq {

/// Optimal action values of the size x size gridworld by synchronous Bellman
/// optimality backups, stopped once the largest change in a sweep drops below
/// `tolerance`. The goal row stays zero (it is never acted from).
tabular::QTable value_iteration_oracle(int grid_size, double gamma, double tolerance);

}  // namespace smoothq
