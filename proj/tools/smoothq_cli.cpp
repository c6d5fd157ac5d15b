#include <iostream>
#include <string>
#include <vector>

#include "smoothq/config.hpp"
#include "smoothq/experiment.hpp"

int main(int argc, char** argv) {
  using smoothq::ConfigError;
  std::vector<std::string> args(argv + 1, argv + argc);
  smoothq::ExperimentConfig config;
  try {
    config = smoothq::parse_config(args);
  } catch (const ConfigError& e) {
    if (e.kind() == ConfigError::Kind::kHelp) {
      std::cout << e.what();
      return 0;
    }
    std::cerr << "smoothq: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }

  try {
    const bool sweeping = !config.sweep_betas.empty();
    std::vector<smoothq::SweepPoint> points;
    if (sweeping) {
      points = smoothq::sweep(config, config.sweep_betas);
    } else {
      points.push_back({config.smooth_rate(), smoothq::run_experiment(config)});
    }
    for (const auto& path : smoothq::write_outputs(config, points, sweeping)) {
      std::cerr << "wrote " << path.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "smoothq: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
