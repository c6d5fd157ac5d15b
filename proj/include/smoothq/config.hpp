#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smoothq/dqn.hpp"
#include "smoothq/tabular.hpp"

namespace smoothq {

enum class EnvKind { kGridworld, kPendulum, kMountainCar };
enum class AlgoKind { kClassic, kStateSmooth, kActionSmooth, kDqn, kSmoothDqn };

const char* to_string(EnvKind kind);
const char* to_string(AlgoKind kind);

inline bool is_tabular(AlgoKind kind) {
  return kind == AlgoKind::kClassic || kind == AlgoKind::kStateSmooth || kind == AlgoKind::kActionSmooth;
}

struct ExperimentConfig {
  EnvKind env = EnvKind::kGridworld;
  AlgoKind algo = AlgoKind::kClassic;
  tabular::TabularHyperParams tabular;
  dqn::DqnHyperParams dqn;
  std::vector<std::size_t> hidden{64, 64};
  std::size_t episodes = 1000;
  std::size_t step_cap = envs::kGridStepCap;
  std::size_t action_levels = envs::kDefaultActionLevels;
  int grid_size = envs::kGridSize;
  bool standard_pendulum = false;
  std::vector<std::uint64_t> seeds{0};
  std::vector<double> sweep_betas;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> checkpoint;
  bool split_output = false;
  bool deterministic_timing = false;
  std::size_t threads = 1;

  /// The smoothing rate the algorithm uses (beta_s, beta_a or beta); 0 for the baselines.
  double smooth_rate() const;
  void set_smooth_rate(double beta);
  tabular::SmoothMode smooth_mode() const;

  /// Throws ConfigError on incompatible combinations or out-of-range values.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { kUnknownFlag, kInvalidValue, kIncompatible, kMissingRequired, kHelp };
  ConfigError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Flags override config-file values, which override defaults. `args` excludes
/// the program name. `--help` raises ConfigError with Kind::kHelp carrying the
/// usage text.
ExperimentConfig parse_config(const std::vector<std::string>& args);

}  // namespace smoothq
