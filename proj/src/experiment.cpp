#include "smoothq/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

#include "smoothq/dqn.hpp"

namespace smoothq {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void finish_record(EpisodeRecord& record, std::size_t episode, std::uint64_t seed, Clock::time_point start,
                   bool deterministic_timing) {
  record.episode = episode;
  record.seed = seed;
  record.wall_ms = deterministic_timing ? 0.0 : elapsed_ms(start);
}

RunResult run_tabular(const ExperimentConfig& config, std::uint64_t seed) {
  const envs::GridWorld env(config.grid_size, config.step_cap);
  tabular::QTable q(env.state_count(), env.action_count());
  Rng rng(seed);
  RunResult result;
  result.seed = seed;
  for (std::size_t episode = 0; episode < config.episodes; ++episode) {
    const auto start = Clock::now();
    EpisodeRecord record = tabular::train_episode(env, q, config.tabular, config.smooth_mode(), rng);
    finish_record(record, episode, seed, start, config.deterministic_timing);
    result.records.push_back(record);
  }
  result.table = std::move(q);
  return result;
}

template <class Env>
RunResult run_dqn(const ExperimentConfig& config, const Env& env, std::uint64_t seed) {
  Rng rng(seed);
  dqn::DqnHyperParams params = config.dqn;
  if (config.algo == AlgoKind::kDqn) params.beta = 0.0;
  dqn::DqnAgent agent(mlp::make_architecture(env.feature_dim(), env.action_count(), config.hidden), params,
                      action_neighborhoods(env, params.delta_a), rng);
  RunResult result;
  result.seed = seed;
  for (std::size_t episode = 0; episode < config.episodes; ++episode) {
    const auto start = Clock::now();
    EpisodeRecord record = dqn::run_episode(env, agent, rng);
    finish_record(record, episode, seed, start, config.deterministic_timing);
    result.records.push_back(record);
  }
  result.network = agent.online();
  return result;
}

// Runs jobs [0, n) on up to `threads` workers. The first exception is rethrown
// after all workers have joined.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& job) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            job(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::string format_beta(double beta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", beta);
  return buf;
}

std::filesystem::path with_suffix(const std::filesystem::path& base, const std::string& suffix) {
  std::filesystem::path out = base;
  out.replace_filename(base.stem().string() + suffix + base.extension().string());
  return out;
}

}  // namespace

RunResult run_single(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  if (is_tabular(config.algo)) return run_tabular(config, seed);
  switch (config.env) {
    case EnvKind::kGridworld:
      return run_dqn(config, envs::GridWorld(config.grid_size, config.step_cap), seed);
    case EnvKind::kPendulum:
      return run_dqn(config, envs::Pendulum(config.action_levels, config.step_cap, config.standard_pendulum), seed);
    case EnvKind::kMountainCar:
      return run_dqn(config, envs::MountainCar(config.action_levels, config.step_cap), seed);
  }
  throw std::logic_error("run_single: unhandled environment");
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<RunResult> runs(config.seeds.size());
  parallel_for(runs.size(), config.threads, [&](std::size_t i) { runs[i] = run_single(config, config.seeds[i]); });
  return runs;
}

std::vector<SweepPoint> sweep(const ExperimentConfig& base, const std::vector<double>& betas) {
  if (betas.empty()) throw ConfigError(ConfigError::Kind::kInvalidValue, "sweep: empty smooth-rate list");
  std::vector<ExperimentConfig> configs;
  for (double beta : betas) {
    ExperimentConfig c = base;
    c.sweep_betas.clear();
    c.set_smooth_rate(beta);
    c.validate();
    configs.push_back(std::move(c));
  }
  const std::size_t n_seeds = base.seeds.size();
  std::vector<SweepPoint> points(betas.size());
  for (std::size_t b = 0; b < betas.size(); ++b) {
    points[b].beta = betas[b];
    points[b].runs.resize(n_seeds);
  }
  parallel_for(betas.size() * n_seeds, base.threads, [&](std::size_t job) {
    const std::size_t b = job / n_seeds;
    const std::size_t k = job % n_seeds;
    points[b].runs[k] = run_single(configs[b], base.seeds[k]);
  });
  return points;
}

std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const std::vector<SweepPoint>& points, bool sweeping) {
  std::vector<std::filesystem::path> written;
  for (const SweepPoint& point : points) {
    const std::string beta_suffix = sweeping ? "_beta" + format_beta(point.beta) : "";
    if (config.out && config.split_output) {
      for (const RunResult& run : point.runs) {
        const auto path = with_suffix(*config.out, beta_suffix + "_seed" + std::to_string(run.seed));
        write_csv(run.records, path);
        written.push_back(path);
      }
    } else {
      std::vector<EpisodeRecord> all;
      for (const RunResult& run : point.runs) all.insert(all.end(), run.records.begin(), run.records.end());
      if (config.out) {
        const auto path = with_suffix(*config.out, beta_suffix);
        write_csv(all, path);
        written.push_back(path);
      } else {
        write_csv(all, std::cout);
      }
    }
    if (config.checkpoint) {
      for (const RunResult& run : point.runs) {
        if (!run.network) continue;
        const auto path = with_suffix(*config.checkpoint, beta_suffix + "_seed" + std::to_string(run.seed));
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
        mlp::save(*run.network, out);
        written.push_back(path);
      }
    }
  }
  return written;
}

}  // namespace smoothq
