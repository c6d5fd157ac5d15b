#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "smoothq/config.hpp"
#include "smoothq/mlp.hpp"
#include "smoothq/records.hpp"
#include "smoothq/tabular.hpp"

namespace smoothq {

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> records;
  std::optional<tabular::QTable> table;    // tabular algorithms
  std::optional<mlp::MlpParams> network;   // dqn algorithms (online network)
};

/// Trains a fresh learner on a fresh environment for config.episodes episodes.
/// Fully determined by (config, seed) apart from wall_ms.
RunResult run_single(const ExperimentConfig& config, std::uint64_t seed);

/// One run per configured seed, in seed-list order.
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

struct SweepPoint {
  double beta = 0.0;
  std::vector<RunResult> runs;
};

/// One run_experiment per smooth rate, every rate reusing the same seed list.
/// Runs execute on config.threads workers; results come back in (beta, seed) order.
std::vector<SweepPoint> sweep(const ExperimentConfig& base, const std::vector<double>& betas);

/// Writes CSV output per the config's --out/--split-output settings (stdout when
/// there is no --out) plus DQN checkpoints when requested. Returns written paths.
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const std::vector<SweepPoint>& points, bool sweeping);

}  // namespace smoothq
