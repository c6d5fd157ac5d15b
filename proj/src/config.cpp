#include "smoothq/config.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace smoothq {

namespace {

using nlohmann::json;
using Kind = ConfigError::Kind;

enum class ValueType { kString, kReal, kCount, kBool, kSeedList, kRealList, kCountList };

struct OptionDef {
  const char* name;
  ValueType type;
  const char* help;
};

// Keys shared by the command line (as --name) and the JSON config file.
constexpr OptionDef kOptions[] = {
    {"env", ValueType::kString, "gridworld | pendulum | mountaincar"},
    {"algo", ValueType::kString, "classic | state-smooth | action-smooth | dqn | smooth-dqn"},
    {"alpha", ValueType::kReal, "step size (tabular default 0.1, dqn default 1e-4)"},
    {"gamma", ValueType::kReal, "discount (gridworld 0.9, otherwise 0.99)"},
    {"epsilon", ValueType::kReal, "exploration probability (default 0.1)"},
    {"beta-s", ValueType::kReal, "state smooth rate for state-smooth (default 0.5)"},
    {"beta-a", ValueType::kReal, "action smooth rate for action-smooth (default 0.5)"},
    {"beta", ValueType::kReal, "smooth rate for smooth-dqn (default 1)"},
    {"delta-s", ValueType::kReal, "state similarity radius (default 1)"},
    {"delta-a", ValueType::kReal, "action similarity radius (gridworld 1.5, otherwise one action step)"},
    {"episodes", ValueType::kCount, "episodes per run"},
    {"seeds", ValueType::kSeedList, "comma-separated seed list (default 0)"},
    {"sweep-betas", ValueType::kRealList, "comma-separated smooth rates to sweep"},
    {"out", ValueType::kString, "CSV output path (stdout when omitted)"},
    {"grid-size", ValueType::kCount, "gridworld side length (default 64)"},
    {"step-cap", ValueType::kCount, "per-episode step cap (gridworld 20000, otherwise 200)"},
    {"action-levels", ValueType::kCount, "discrete torque/force levels (default 64)"},
    {"capacity", ValueType::kCount, "replay capacity N (default 50000)"},
    {"batch-size", ValueType::kCount, "minibatch size (default 64)"},
    {"target-sync", ValueType::kCount, "target network sync period C (default 500)"},
    {"warmup", ValueType::kCount, "transitions before the first gradient step (default 1000)"},
    {"hidden", ValueType::kCountList, "hidden layer widths (default 64,64)"},
    {"threads", ValueType::kCount, "worker threads for independent runs (default 1)"},
    {"checkpoint", ValueType::kString, "save final DQN networks under this path prefix"},
    {"split-output", ValueType::kBool, "one CSV per (beta, seed)"},
    {"deterministic-timing", ValueType::kBool, "write wall_ms as 0"},
    {"standard-pendulum", ValueType::kBool, "use the semi-implicit Euler pendulum integrator"},
};

const OptionDef* find_option(const std::string& name) {
  for (const OptionDef& def : kOptions) {
    if (name == def.name) return &def;
  }
  return nullptr;
}

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
  throw ConfigError(Kind::kInvalidValue, "invalid value for --" + key + ": " + why);
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  const auto last = s.find_last_not_of(" \t");
  return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  return parts;
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) invalid(key, "'" + text + "' is not a number");
  return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    invalid(key, "'" + text + "' is not a non-negative integer");
  }
  return v;
}

// Values coming from the command line are strings; values from the file may be
// JSON numbers, booleans or arrays. Every reader accepts both forms.
class Values {
 public:
  explicit Values(json merged) : data_(std::move(merged)) {}

  bool has(const char* key) const { return data_.contains(key); }

  std::string string(const char* key) const {
    const json& v = data_.at(key);
    if (!v.is_string()) invalid(key, "expected a string");
    return v.get<std::string>();
  }

  double real(const char* key) const {
    const json& v = data_.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_real(key, v.get<std::string>());
    invalid(key, "expected a number");
  }

  std::uint64_t count(const char* key) const {
    const json& v = data_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) invalid(key, "must not be negative");
    if (v.is_string()) return parse_count(key, v.get<std::string>());
    invalid(key, "expected a non-negative integer");
  }

  bool boolean(const char* key) const {
    const json& v = data_.at(key);
    if (!v.is_boolean()) invalid(key, "expected true or false");
    return v.get<bool>();
  }

  std::vector<std::string> list(const char* key) const {
    const json& v = data_.at(key);
    std::vector<std::string> items;
    if (v.is_string()) {
      items = split_list(v.get<std::string>());
    } else if (v.is_array()) {
      for (const json& e : v) items.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    } else {
      invalid(key, "expected a comma-separated list or an array");
    }
    if (items.empty()) invalid(key, "list is empty");
    return items;
  }

  std::vector<double> real_list(const char* key) const {
    std::vector<double> out;
    for (const auto& item : list(key)) out.push_back(parse_real(key, item));
    return out;
  }

  std::vector<std::uint64_t> count_list(const char* key) const {
    std::vector<std::uint64_t> out;
    for (const auto& item : list(key)) out.push_back(parse_count(key, item));
    return out;
  }

 private:
  json data_;
};

EnvKind parse_env(const std::string& name) {
  if (name == "gridworld") return EnvKind::kGridworld;
  if (name == "pendulum") return EnvKind::kPendulum;
  if (name == "mountaincar") return EnvKind::kMountainCar;
  invalid("env", "'" + name + "' (expected gridworld, pendulum or mountaincar)");
}

AlgoKind parse_algo(const std::string& name) {
  if (name == "classic") return AlgoKind::kClassic;
  if (name == "state-smooth") return AlgoKind::kStateSmooth;
  if (name == "action-smooth") return AlgoKind::kActionSmooth;
  if (name == "dqn") return AlgoKind::kDqn;
  if (name == "smooth-dqn") return AlgoKind::kSmoothDqn;
  invalid("algo", "'" + name + "' (expected classic, state-smooth, action-smooth, dqn or smooth-dqn)");
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(Kind::kInvalidValue, "invalid value for --config: cannot open " + path);
  json file;
  try {
    file = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(Kind::kInvalidValue, "invalid value for --config: " + path + ": " + e.what());
  }
  if (!file.is_object()) {
    throw ConfigError(Kind::kInvalidValue, "invalid value for --config: " + path + " must hold a JSON object");
  }
  for (const auto& [key, value] : file.items()) {
    if (!find_option(key)) throw ConfigError(Kind::kUnknownFlag, "unknown key '" + key + "' in " + path);
  }
  return file;
}

[[noreturn]] void incompatible(const std::string& why) { throw ConfigError(Kind::kIncompatible, why); }

ExperimentConfig build(const Values& v) {
  std::vector<std::string> missing;
  if (!v.has("env")) missing.push_back("--env");
  if (!v.has("algo")) missing.push_back("--algo");
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError(Kind::kMissingRequired, "missing required flags: " + list);
  }

  ExperimentConfig c;
  c.env = parse_env(v.string("env"));
  c.algo = parse_algo(v.string("algo"));
  const bool tabular_algo = is_tabular(c.algo);
  const bool gridworld = c.env == EnvKind::kGridworld;

  if (tabular_algo && !gridworld) {
    incompatible(std::string("--algo ") + to_string(c.algo) + " needs a discrete-state environment; --env " +
                 to_string(c.env) + " has a continuous state");
  }
  // Reject settings the chosen algorithm would silently ignore.
  auto reject_nonzero = [&](const char* key, bool used) {
    if (!used && v.has(key) && v.real(key) != 0.0) {
      incompatible(std::string("--") + key + " has no effect with --algo " + to_string(c.algo));
    }
  };
  reject_nonzero("beta-s", c.algo == AlgoKind::kStateSmooth);
  reject_nonzero("beta-a", c.algo == AlgoKind::kActionSmooth);
  reject_nonzero("beta", c.algo == AlgoKind::kSmoothDqn);
  for (const char* key : {"capacity", "batch-size", "target-sync", "warmup", "hidden", "checkpoint"}) {
    if (tabular_algo && v.has(key)) incompatible(std::string("--") + key + " applies only to dqn algorithms");
  }
  if (!gridworld && v.has("grid-size")) incompatible("--grid-size applies only to --env gridworld");
  if (gridworld && v.has("action-levels")) incompatible("--action-levels does not apply to --env gridworld");
  if (c.env != EnvKind::kPendulum && v.has("standard-pendulum")) {
    incompatible("--standard-pendulum applies only to --env pendulum");
  }

  if (v.has("grid-size")) c.grid_size = static_cast<int>(std::min<std::uint64_t>(v.count("grid-size"), 1 << 20));
  if (v.has("action-levels")) c.action_levels = v.count("action-levels");
  if (v.has("standard-pendulum")) c.standard_pendulum = v.boolean("standard-pendulum");

  c.step_cap = gridworld ? envs::kGridStepCap
                         : (c.env == EnvKind::kPendulum ? envs::kPendulumEpisodeSteps : envs::kMountainCarStepCap);
  if (v.has("step-cap")) c.step_cap = v.count("step-cap");
  c.episodes = gridworld ? 1000 : 150;
  if (v.has("episodes")) c.episodes = v.count("episodes");

  const double gamma = v.has("gamma") ? v.real("gamma") : (gridworld ? 0.9 : 0.99);
  const double epsilon = v.has("epsilon") ? v.real("epsilon") : 0.1;
  double delta_a = 1.5;
  if (!gridworld) {
    const double hi = c.env == EnvKind::kPendulum ? envs::pendulum_constants::kMaxTorque : 1.0;
    if (c.action_levels >= 2) delta_a = envs::ActionGrid{-hi, hi, c.action_levels}.spacing() + 1e-9;
  }
  if (v.has("delta-a")) delta_a = v.real("delta-a");

  c.tabular.gamma = gamma;
  c.tabular.epsilon = epsilon;
  c.tabular.delta_a = delta_a;
  if (v.has("delta-s")) c.tabular.delta_s = v.real("delta-s");
  c.tabular.beta_s = c.algo == AlgoKind::kStateSmooth ? 0.5 : 0.0;
  c.tabular.beta_a = c.algo == AlgoKind::kActionSmooth ? 0.5 : 0.0;
  if (v.has("beta-s")) c.tabular.beta_s = v.real("beta-s");
  if (v.has("beta-a")) c.tabular.beta_a = v.real("beta-a");

  c.dqn.gamma = gamma;
  c.dqn.epsilon = epsilon;
  c.dqn.delta_a = delta_a;
  c.dqn.beta = c.algo == AlgoKind::kSmoothDqn ? 1.0 : 0.0;
  if (v.has("beta")) c.dqn.beta = v.real("beta");
  if (v.has("capacity")) c.dqn.capacity = v.count("capacity");
  if (v.has("batch-size")) c.dqn.batch_size = v.count("batch-size");
  if (v.has("target-sync")) c.dqn.target_sync = v.count("target-sync");
  if (v.has("warmup")) c.dqn.warmup_steps = v.count("warmup");
  if (v.has("hidden")) {
    c.hidden.clear();
    for (auto w : v.count_list("hidden")) c.hidden.push_back(w);
  }
  if (v.has("alpha")) {
    (tabular_algo ? c.tabular.alpha : c.dqn.alpha) = v.real("alpha");
  }

  if (v.has("seeds")) c.seeds = v.count_list("seeds");
  if (v.has("sweep-betas")) c.sweep_betas = v.real_list("sweep-betas");
  if (v.has("out")) c.out = v.string("out");
  if (v.has("checkpoint")) c.checkpoint = v.string("checkpoint");
  if (v.has("threads")) c.threads = v.count("threads");
  if (v.has("split-output")) c.split_output = v.boolean("split-output");
  if (v.has("deterministic-timing")) c.deterministic_timing = v.boolean("deterministic-timing");

  c.validate();
  return c;
}

}  // namespace

const char* to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::kGridworld: return "gridworld";
    case EnvKind::kPendulum: return "pendulum";
    case EnvKind::kMountainCar: return "mountaincar";
  }
  return "?";
}

const char* to_string(AlgoKind kind) {
  switch (kind) {
    case AlgoKind::kClassic: return "classic";
    case AlgoKind::kStateSmooth: return "state-smooth";
    case AlgoKind::kActionSmooth: return "action-smooth";
    case AlgoKind::kDqn: return "dqn";
    case AlgoKind::kSmoothDqn: return "smooth-dqn";
  }
  return "?";
}

double ExperimentConfig::smooth_rate() const {
  switch (algo) {
    case AlgoKind::kStateSmooth: return tabular.beta_s;
    case AlgoKind::kActionSmooth: return tabular.beta_a;
    case AlgoKind::kSmoothDqn: return dqn.beta;
    default: return 0.0;
  }
}

void ExperimentConfig::set_smooth_rate(double beta) {
  switch (algo) {
    case AlgoKind::kStateSmooth: tabular.beta_s = beta; break;
    case AlgoKind::kActionSmooth: tabular.beta_a = beta; break;
    case AlgoKind::kSmoothDqn: dqn.beta = beta; break;
    default:
      throw ConfigError(ConfigError::Kind::kIncompatible,
                        std::string("--algo ") + to_string(algo) + " has no smooth rate to set");
  }
}

tabular::SmoothMode ExperimentConfig::smooth_mode() const {
  switch (algo) {
    case AlgoKind::kStateSmooth: return tabular::SmoothMode::kState;
    case AlgoKind::kActionSmooth: return tabular::SmoothMode::kAction;
    default: return tabular::SmoothMode::kNone;
  }
}

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& key, const std::string& why) { invalid(key, why); };
  if (is_tabular(algo) && env != EnvKind::kGridworld) {
    incompatible(std::string("--algo ") + to_string(algo) + " needs a discrete-state environment");
  }
  try {
    if (is_tabular(algo)) {
      tabular.validate();
    } else {
      dqn.validate();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ConfigError::Kind::kInvalidValue, e.what());
  }
  if (episodes == 0) bad("episodes", "must be at least 1");
  if (step_cap == 0) bad("step-cap", "must be at least 1");
  if (grid_size < 2 || grid_size > envs::kGridSize) bad("grid-size", "must be in [2, 64]");
  if (action_levels < 2) bad("action-levels", "must be at least 2");
  if (seeds.empty()) bad("seeds", "list is empty");
  if (threads == 0) bad("threads", "must be at least 1");
  if (!is_tabular(algo)) {
    if (hidden.empty()) bad("hidden", "list is empty");
    for (auto w : hidden) {
      if (w == 0) bad("hidden", "layer widths must be positive");
    }
  }
  if (!sweep_betas.empty()) {
    if (smooth_mode() == tabular::SmoothMode::kNone && algo != AlgoKind::kSmoothDqn) {
      incompatible(std::string("--sweep-betas needs a smooth algorithm, not --algo ") + to_string(algo));
    }
    if (!out) incompatible("--sweep-betas needs --out (one CSV per smooth rate)");
    for (double b : sweep_betas) {
      if (!(b >= 0.0) || (is_tabular(algo) && b > 1.0)) bad("sweep-betas", "smooth rate out of range");
    }
  }
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Q-learning with similarity smoothing: seeded benchmark runs", "smoothq"};
  app.set_help_flag("-h,--help", "print this help and exit");
  std::map<std::string, std::string> given;
  std::string config_path;
  app.add_option("--config", config_path, "JSON file whose keys mirror the long flags");
  for (const OptionDef& def : kOptions) {
    const std::string flag = std::string("--") + def.name;
    if (def.type == ValueType::kBool) {
      app.add_flag(flag, def.help);
    } else {
      app.add_option(flag, given[def.name], def.help);
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw ConfigError(Kind::kHelp, app.help());
  } catch (const CLI::ExtrasError& e) {
    throw ConfigError(Kind::kUnknownFlag, std::string("unknown flag: ") + e.what());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(Kind::kInvalidValue, e.what());
  }

  json merged = config_path.empty() ? json::object() : load_config_file(config_path);
  for (const OptionDef& def : kOptions) {
    const std::string flag = std::string("--") + def.name;
    if (app.count(flag) == 0) continue;
    if (def.type == ValueType::kBool) {
      merged[def.name] = true;
    } else {
      merged[def.name] = given[def.name];
    }
  }
  return build(Values(std::move(merged)));
}

}  // namespace smoothq
