// End-to-end acceptance checks. Prints one [PASS]/[FAIL] line per criterion.
//
//   smoothq_acceptance [--cli PATH] [criterion...]
//
// With no criterion numbers every check runs. Exit status is nonzero if any
// selected check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "smoothq/config.hpp"
#include "smoothq/dqn.hpp"
#include "smoothq/envs.hpp"
#include "smoothq/experiment.hpp"
#include "smoothq/neighbors.hpp"
#include "smoothq/oracle.hpp"
#include "smoothq/records.hpp"
#include "smoothq/tabular.hpp"

namespace {

using namespace smoothq;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

std::string join(const std::vector<double>& v, const char* fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + format(fmt, v[i]);
  return out;
}

// 1. Classic Q-learning on 8x8 recovers the oracle path length.
Outcome oracle_optimality() {
  const auto start = Clock::now();
  constexpr int kSize = 8;
  const envs::GridWorld env(kSize);
  const auto oracle = value_iteration_oracle(kSize, 0.9, 1e-12);
  const auto oracle_len = tabular::greedy_path_length(env, oracle, 1000);
  if (!oracle_len || *oracle_len != 14) return {false, "oracle path is not 14 steps"};

  ExperimentConfig c;
  c.env = EnvKind::kGridworld;
  c.algo = AlgoKind::kClassic;
  c.grid_size = kSize;
  c.episodes = 2000;
  int matches = 0;
  std::string lengths;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RunResult run = run_single(c, seed);
    const auto len = tabular::greedy_path_length(env, *run.table, 1000);
    if (len && *len == *oracle_len) ++matches;
    lengths += (seed ? " " : "") + (len ? std::to_string(*len) : std::string("none"));
  }
  const double elapsed = seconds_since(start);
  return {matches >= 9 && elapsed < 10.0,
          format("%d/10 seeds at %zu steps (lengths %s), %.2f s", matches, *oracle_len, lengths.c_str(), elapsed)};
}

// Episode index (1-based) of the first episode of at most 150 steps.
std::size_t first_hit(tabular::SmoothMode mode, const tabular::TabularHyperParams& p, std::uint64_t seed) {
  constexpr std::size_t kMaxEpisodes = 200000;
  const envs::GridWorld env(64);
  tabular::QTable q(env.state_count(), env.action_count());
  Rng rng(seed);
  for (std::size_t e = 1; e <= kMaxEpisodes; ++e) {
    if (tabular::train_episode(env, q, p, mode, rng).steps <= 150) return e;
  }
  return kMaxEpisodes + 1;
}

Outcome first_hit_comparison(tabular::SmoothMode mode) {
  const auto start = Clock::now();
  tabular::TabularHyperParams smooth;
  smooth.delta_s = 1.0;
  smooth.delta_a = 1.5;
  if (mode == tabular::SmoothMode::kState) smooth.beta_s = 0.5;
  if (mode == tabular::SmoothMode::kAction) smooth.beta_a = 0.5;
  tabular::TabularHyperParams base = smooth;
  base.beta_s = 0.0;
  base.beta_a = 0.0;
  std::vector<double> smooth_hits, base_hits;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    smooth_hits.push_back(static_cast<double>(first_hit(mode, smooth, seed)));
    base_hits.push_back(static_cast<double>(first_hit(mode, base, seed)));
  }
  const double ms = median(smooth_hits);
  const double mb = median(base_hits);
  const double elapsed = seconds_since(start);
  return {ms < mb && elapsed < 300.0,
          format("median first hit %.1f vs baseline %.1f (smooth: %s; baseline: %s), %.1f s", ms, mb,
                 join(smooth_hits, "%.0f").c_str(), join(base_hits, "%.0f").c_str(), elapsed)};
}

// 4a. Zero smooth rates reproduce classic Q-learning table by table.
bool tabular_zero_rate_identity(int size, std::size_t episodes, tabular::SmoothMode mode, double delta,
                                std::uint64_t seed, std::size_t& compared) {
  const envs::GridWorld env(size);
  tabular::TabularHyperParams p;
  p.delta_s = delta;
  p.delta_a = delta;
  tabular::QTable q(env.state_count(), env.action_count());
  Rng rng(seed);
  testing::ClassicQLearner reference(size, p.alpha, p.gamma, p.epsilon, seed);
  bool identical = true;
  auto hook = [&](const tabular::QTable& table) {
    reference.step();
    ++compared;
    identical = identical && testing::same_bits(table.values(), reference.values());
  };
  for (std::size_t e = 0; e < episodes && identical; ++e) tabular::train_episode(env, q, p, mode, rng, hook);
  return identical;
}

// 4b. Zero smooth rate DQN against the Nature DQN reference, step by step.
bool dqn_zero_rate_identity(std::uint64_t seed, std::size_t steps) {
  const envs::Pendulum env;
  dqn::DqnHyperParams p;
  p.beta = 0.0;
  p.delta_a = env.action_grid().spacing() + 1e-9;
  p.batch_size = 32;
  p.warmup_steps = 32;
  p.target_sync = 100;
  p.capacity = 600;
  const auto arch = mlp::make_architecture(env.feature_dim(), env.action_count());

  Rng init_a(seed), init_b(seed);
  dqn::DqnAgent agent(arch, p, action_neighborhoods(env, p.delta_a), init_a);
  testing::NatureDqn nature(arch, p, init_b);
  if (!testing::same_bits(mlp::flatten(agent.online()), mlp::flatten(nature.online()))) return false;

  Rng rng_a(seed + 1), rng_b(seed + 1);
  envs::PendulumState sa = env.reset(rng_a);
  envs::PendulumState sb = env.reset(rng_b);
  std::size_t in_episode = 0;
  for (std::size_t i = 0; i < steps; ++i) {
    const Eigen::VectorXd xa = dqn::to_eigen(env.features(sa));
    const Eigen::VectorXd xb = dqn::to_eigen(env.features(sb));
    const std::size_t aa = agent.act(xa, p.epsilon, rng_a);
    const std::size_t ab = nature.act(xb, rng_b);
    if (aa != ab) return false;
    const auto ra = env.step(sa, aa);
    const auto rb = env.step(sb, ab);
    agent.observe({xa, aa, ra.reward, dqn::to_eigen(env.features(ra.next_state)), ra.terminal}, rng_a);
    nature.observe({xb, ab, rb.reward, dqn::to_eigen(env.features(rb.next_state)), rb.terminal}, rng_b);
    if (!testing::same_bits(mlp::flatten(agent.online()), mlp::flatten(nature.online()))) return false;
    sa = ra.next_state;
    sb = rb.next_state;
    if (++in_episode == env.step_cap()) {
      sa = env.reset(rng_a);
      sb = env.reset(rng_b);
      in_episode = 0;
    }
  }
  return agent.buffer().size() == nature.buffer().size() && rng_a.state() == rng_b.state();
}

Outcome zero_rate_identities() {
  using tabular::SmoothMode;
  std::size_t compared = 0;
  int failures = 0;
  int cases = 0;
  for (SmoothMode mode : {SmoothMode::kState, SmoothMode::kAction, SmoothMode::kBoth}) {
    for (std::uint64_t seed : {0, 1, 2}) {
      ++cases;
      failures += !tabular_zero_rate_identity(64, 2, mode, 1.5 + static_cast<double>(seed), seed, compared);
      ++cases;
      failures += !tabular_zero_rate_identity(12, 150, mode, 2.0, seed + 10, compared);
    }
  }
  const std::size_t tabular_steps = compared;
  int dqn_failures = 0;
  for (std::uint64_t seed : {0, 1, 2}) dqn_failures += !dqn_zero_rate_identity(seed, 1000);
  return {failures == 0 && dqn_failures == 0,
          format("tabular %d/%d runs bitwise equal over %zu steps; dqn %d/3 runs bitwise equal over 1000 steps",
                 cases - failures, cases, tabular_steps, 3 - dqn_failures)};
}

// 5. Analytic gradient of l0 + l1 against central differences.
Outcome gradient_check() {
  Rng rng(2024);
  double worst = 0.0;
  for (int instance = 0; instance < 10; ++instance) {
    const std::size_t in = 1 + rng.uniform_index(4);
    const std::size_t out = 2 + rng.uniform_index(6);
    std::vector<std::size_t> hidden(1 + rng.uniform_index(2));
    for (auto& h : hidden) h = 2 + rng.uniform_index(7);
    const envs::ActionGrid grid{-1.0, 1.0, out};
    const double delta = rng.uniform(0.0, 3.0 * grid.spacing());
    ActionNeighborhoods neighborhoods(out);
    for (std::size_t a = 0; a < out; ++a) {
      neighborhoods[a] = testing::brute_force_level_neighbors(grid.lo, grid.hi, out, a, delta);
    }
    dqn::DqnHyperParams p;
    p.beta = rng.uniform(0.0, 1.5);
    p.gamma = 0.9;
    dqn::DqnAgent agent(mlp::make_architecture(in, out, hidden), p, neighborhoods, rng);
    // Move the online network away from the target copy.
    auto theta = mlp::flatten(agent.online());
    for (double& w : theta) w += rng.uniform(-0.3, 0.3);
    mlp::unflatten(agent.online(), theta);

    std::vector<dqn::Transition> batch(1 + rng.uniform_index(8));
    for (auto& t : batch) {
      t.state = Eigen::VectorXd(static_cast<Eigen::Index>(in));
      t.next_state = Eigen::VectorXd(static_cast<Eigen::Index>(in));
      for (Eigen::Index i = 0; i < t.state.size(); ++i) {
        t.state(i) = rng.uniform(-1, 1);
        t.next_state(i) = rng.uniform(-1, 1);
      }
      t.action = rng.uniform_index(out);
      t.reward = rng.uniform(-2, 2);
      t.terminal = rng.bernoulli(0.2);
    }
    std::vector<double> targets;
    for (const auto& t : batch) targets.push_back(dqn::compute_target(t, agent.target(), p.gamma));
    mlp::MlpParams probe = agent.online();
    auto loss = [&](const std::vector<double>& x) {
      mlp::unflatten(probe, x);
      return dqn::loss_l0(batch, probe, targets) + dqn::loss_l1(batch, probe, targets, p.beta, neighborhoods);
    };
    mlp::GradAccumulator grads(agent.online());
    agent.accumulate_gradient(batch, grads);
    const auto numeric = testing::central_differences(loss, mlp::flatten(agent.online()), 1e-5);
    worst = std::max(worst, testing::relative_error(mlp::flatten(grads), numeric));
  }
  return {worst < 1e-4, format("worst relative error %.3g over 10 networks", worst)};
}

// 6. Neighbor sets against brute-force enumeration.
Outcome neighbor_equivalence() {
  Rng rng(77);
  const envs::GridWorld grid(64);
  const envs::Pendulum pendulum;
  const envs::MountainCar car;
  std::size_t mismatches = 0;
  std::size_t checks = 0;
  for (int trial = 0; trial < 100; ++trial) {
    // Every tenth radius sits exactly on a lattice distance.
    static constexpr double kLattice[] = {0.0, 1.0, std::numbers::sqrt2, 2.0, 2.23606797749979,
                                          3.0, 4.0, 5.0, 1.4142135623730951, 2.8284271247461903};
    const double delta_s = trial % 10 == 0 ? kLattice[trial / 10] : rng.uniform(0.0, 6.0);
    const tabular::StateNeighborhood cached(grid, delta_s);
    std::vector<std::size_t> via_cache;
    for (std::size_t s = 0; s < grid.state_count(); ++s) {
      const auto expected = testing::brute_force_state_neighbors(64, s, delta_s);
      cached.neighbors(s, via_cache);
      mismatches += tabular::state_neighbors(grid, s, delta_s) != expected;
      mismatches += via_cache != expected;
      checks += 2;
    }

    const double delta_grid = trial % 10 == 0 ? kLattice[trial / 10] : rng.uniform(0.0, 2.5);
    for (std::size_t a = 0; a < 4; ++a) {
      mismatches += action_neighbors(grid, a, delta_grid) != testing::brute_force_grid_action_neighbors(a, delta_grid);
      ++checks;
    }
    const double delta_p = rng.uniform(0.0, 4.5);
    const double delta_c = rng.uniform(0.0, 2.2);
    for (std::size_t a = 0; a < pendulum.action_count(); ++a) {
      mismatches += action_neighbors(pendulum, a, delta_p) !=
                    testing::brute_force_level_neighbors(-2.0, 2.0, pendulum.action_count(), a, delta_p);
      mismatches += action_neighbors(car, a, delta_c) !=
                    testing::brute_force_level_neighbors(-1.0, 1.0, car.action_count(), a, delta_c);
      checks += 2;
    }
  }
  return {mismatches == 0, format("%zu mismatches in %zu neighbor sets over 100 radii", mismatches, checks)};
}

// 7. Table entries stay inside the reward-implied bounds.
Outcome boundedness() {
  Rng draw(31337);
  const envs::GridWorld env(64);
  double lo = 0.0, hi = 0.0;
  bool ok = true;
  std::string rates;
  for (int run = 0; run < 8; ++run) {
    tabular::TabularHyperParams p;
    // Corners of the rate square first, then random rates.
    p.beta_s = run < 4 ? static_cast<double>(run & 1) : draw.uniform(0.0, 1.0);
    p.beta_a = run < 4 ? static_cast<double>(run >> 1) : draw.uniform(0.0, 1.0);
    p.delta_s = draw.uniform(1.0, 3.0);
    p.delta_a = draw.uniform(1.0, 2.5);
    tabular::QTable q(env.state_count(), env.action_count());
    Rng rng(static_cast<std::uint64_t>(run));
    std::size_t steps = 0;
    while (steps < 100000) {
      steps += tabular::train_episode(env, q, p, tabular::SmoothMode::kBoth, rng).steps;
      const auto [mn, mx] = std::minmax_element(q.values().begin(), q.values().end());
      lo = std::min(lo, *mn);
      hi = std::max(hi, *mx);
      ok = ok && *mn >= -10.0 && *mx <= 1000.0;
    }
    rates += format("%s(%.2f,%.2f)", run ? " " : "", p.beta_s, p.beta_a);
  }
  return {ok, format("entries in [%.4f, %.4f] across 8 runs of >= 1e5 steps, rates %s", lo, hi, rates.c_str())};
}

// 8. Pendulum smooth DQN against the beta = 0 baseline on paired seeds, both
// with the shipped command-line defaults.
Outcome pendulum_dqn() {
  const auto start = Clock::now();
  const auto smooth = parse_config({"--env", "pendulum", "--algo", "smooth-dqn", "--seeds", "0,1,2,3,4"});
  const auto base = parse_config({"--env", "pendulum", "--algo", "dqn", "--seeds", "0,1,2,3,4"});
  const double one_step = envs::ActionGrid{-2.0, 2.0, smooth.action_levels}.spacing();
  if (smooth.dqn.beta <= 0.0 || std::fabs(smooth.dqn.delta_a - one_step) > 1e-6 || smooth.episodes != 150 ||
      smooth.step_cap != 200) {
    return {false, "default smooth-dqn configuration is not beta > 0, one grid step, 150 x 200"};
  }
  auto final_mean = [](const RunResult& run) {
    double sum = 0.0;
    for (std::size_t e = run.records.size() - 20; e < run.records.size(); ++e) sum += run.records[e].ret;
    return sum / 20.0;
  };
  std::vector<double> s, b;
  for (const auto& run : run_experiment(smooth)) s.push_back(final_mean(run));
  for (const auto& run : run_experiment(base)) b.push_back(final_mean(run));
  const double ms = median(s);
  const double mb = median(b);
  const double elapsed = seconds_since(start);
  return {ms >= mb && elapsed < 1200.0,
          format("beta %g: median final-20 return %.2f vs baseline %.2f (smooth: %s; baseline: %s), %.0f s",
                 smooth.dqn.beta, ms, mb, join(s, "%.2f").c_str(), join(b, "%.2f").c_str(), elapsed)};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

// Name -> contents for every file in `dir`.
std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    files.emplace_back(entry.path().filename().string(), slurp(entry.path()));
  }
  std::sort(files.begin(), files.end());
  return files;
}

// 9. Identical configs with deterministic timing give identical CSV bytes,
// through the library and through the command-line tool.
Outcome determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "smoothq_acceptance_determinism";
  const std::vector<std::vector<std::string>> configs = {
      {"--env", "gridworld", "--algo", "classic", "--grid-size", "16", "--episodes", "40", "--seeds", "0,1"},
      {"--env", "gridworld", "--algo", "state-smooth", "--grid-size", "16", "--episodes", "40",
       "--sweep-betas", "0,0.5", "--split-output"},
      {"--env", "gridworld", "--algo", "action-smooth", "--grid-size", "16", "--episodes", "40"},
      {"--env", "pendulum", "--algo", "smooth-dqn", "--episodes", "3", "--warmup", "64", "--hidden", "16"},
      {"--env", "mountaincar", "--algo", "dqn", "--episodes", "3", "--warmup", "64", "--hidden", "16,16",
       "--seeds", "2,3", "--threads", "2"},
  };
  std::size_t compared = 0;
  std::size_t differing = 0;
  std::size_t failed_runs = 0;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    for (const bool via_cli : {false, true}) {
      if (via_cli && cli.empty()) continue;
      std::vector<std::pair<std::string, std::string>> outputs[2];
      for (int rep = 0; rep < 2; ++rep) {
        const fs::path dir = root / format("config%zu_%s_%d", k, via_cli ? "cli" : "lib", rep);
        fs::remove_all(dir);
        fs::create_directories(dir);
        auto args = configs[k];
        args.insert(args.end(), {"--deterministic-timing", "--out", (dir / "curve.csv").string()});
        if (via_cli) {
          std::string cmd = shell_quote(cli);
          for (const auto& a : args) cmd += " " + shell_quote(a);
          cmd += " 2>/dev/null";
          failed_runs += std::system(cmd.c_str()) != 0;
        } else {
          const ExperimentConfig c = parse_config(args);
          const bool sweeping = !c.sweep_betas.empty();
          write_outputs(c,
                        sweeping ? sweep(c, c.sweep_betas)
                                 : std::vector<SweepPoint>{{c.smooth_rate(), run_experiment(c)}},
                        sweeping);
        }
        outputs[rep] = snapshot(dir);
      }
      ++compared;
      const bool empty = outputs[0].empty() ||
                         std::any_of(outputs[0].begin(), outputs[0].end(), [](const auto& f) { return f.second.empty(); });
      differing += empty || outputs[0] != outputs[1];
    }
  }
  return {differing == 0 && failed_runs == 0,
          format("%zu run pairs compared (library%s), %zu differ, %zu cli failures", compared,
                 cli.empty() ? " only" : " and cli", differing, failed_runs)};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else {
      selected.insert(std::atoi(arg.c_str()));
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"classic Q-learning matches the oracle path on 8x8", oracle_optimality},
      {"state smoothing reaches a 150-step episode sooner on 64x64",
       [] { return first_hit_comparison(tabular::SmoothMode::kState); }},
      {"action smoothing reaches a 150-step episode sooner on 64x64",
       [] { return first_hit_comparison(tabular::SmoothMode::kAction); }},
      {"zero smooth rates are bitwise classic Q-learning and Nature DQN", zero_rate_identities},
      {"l0 + l1 gradient matches central differences", gradient_check},
      {"neighbor sets equal brute-force enumeration", neighbor_equivalence},
      {"table entries stay within [-10, 1000]", boundedness},
      {"smooth DQN on Pendulum is at least as good as beta = 0", pendulum_dqn},
      {"deterministic timing gives byte-identical CSV", [&] { return determinism(cli); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %d %s: %s\n", outcome.pass ? "PASS" : "FAIL", number, criteria[i].first.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
    failures += !outcome.pass;
  }
  return failures == 0 ? 0 : 1;
}
