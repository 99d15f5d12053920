#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "clipadp/experiment.h"

namespace clipadp {

namespace {

const std::vector<std::string>& Keys() {
  static const std::vector<std::string> keys = {
      "env",   "algo",  "clip", "iterations",   "seeds",     "alpha",
      "beta",  "gamma", "sigma", "dt",          "critic-slope",
      "max-steps", "batch-size", "start-seed", "out", "snapshot-dir",
      "init-actor"};
  return keys;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ParseDouble(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw UsageError("--" + key + ": '" + value + "' is not a number");
  }
  return out;
}

long long ParseInt(const std::string& key, const std::string& value) {
  long long out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("--" + key + ": '" + value + "' is not an integer");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1" || value == "yes") {
    return true;
  }
  if (value == "off" || value == "false" || value == "0" || value == "no") {
    return false;
  }
  throw UsageError("--" + key + ": expected on/off, got '" + value + "'");
}

void Apply(const std::string& key, const std::string& value,
           ExperimentConfig& cfg) {
  auto positive = [&](double v) {
    if (!(v > 0.0)) throw UsageError("--" + key + " must be positive");
    return v;
  };
  auto non_negative = [&](double v) {
    if (v < 0.0) throw UsageError("--" + key + " must be non-negative");
    return v;
  };
  if (key == "env") {
    if (value == "lander") {
      cfg.env = EnvKind::kLander;
    } else if (value == "cartpole") {
      cfg.env = EnvKind::kCartPole;
    } else {
      throw UsageError("--env: expected lander or cartpole, got '" + value +
                       "'");
    }
  } else if (key == "algo") {
    if (value == "bptt") {
      cfg.algo = AlgoKind::kBptt;
    } else if (value == "dhp") {
      cfg.algo = AlgoKind::kDhp;
    } else if (value == "hdp") {
      cfg.algo = AlgoKind::kHdp;
    } else {
      throw UsageError("--algo: expected bptt, dhp or hdp, got '" + value +
                       "'");
    }
  } else if (key == "clip") {
    cfg.clip = ParseBool(key, value);
  } else if (key == "iterations") {
    const long long n = ParseInt(key, value);
    if (n < 0 || n > 100000000) throw UsageError("--iterations out of range");
    cfg.iterations = static_cast<int>(n);
  } else if (key == "seeds") {
    std::vector<int> seeds;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      seeds.push_back(static_cast<int>(ParseInt(key, Trim(item))));
    }
    if (seeds.empty()) throw UsageError("--seeds: empty list");
    if (std::set<int>(seeds.begin(), seeds.end()).size() != seeds.size()) {
      throw UsageError("--seeds: duplicate seed");
    }
    cfg.seeds = std::move(seeds);
  } else if (key == "alpha") {
    cfg.alpha = non_negative(ParseDouble(key, value));
  } else if (key == "beta") {
    cfg.beta = non_negative(ParseDouble(key, value));
  } else if (key == "gamma") {
    const double g = ParseDouble(key, value);
    if (!(g > 0.0 && g <= 1.0)) throw UsageError("--gamma must lie in (0, 1]");
    cfg.gamma = g;
  } else if (key == "sigma") {
    cfg.sigma = non_negative(ParseDouble(key, value));
  } else if (key == "dt") {
    cfg.dt = positive(ParseDouble(key, value));
  } else if (key == "critic-slope") {
    cfg.critic_slope = positive(ParseDouble(key, value));
  } else if (key == "max-steps") {
    const long long n = ParseInt(key, value);
    if (n < 1 || n > 1000000000) throw UsageError("--max-steps out of range");
    cfg.max_steps = static_cast<int>(n);
  } else if (key == "batch-size") {
    const long long n = ParseInt(key, value);
    if (n < 1 || n > 1000) throw UsageError("--batch-size out of range");
    cfg.batch_size = static_cast<int>(n);
  } else if (key == "start-seed") {
    const long long n = ParseInt(key, value);
    if (n < 0) throw UsageError("--start-seed must be non-negative");
    cfg.start_seed = static_cast<std::uint64_t>(n);
  } else if (key == "out") {
    if (value.empty()) throw UsageError("--out: empty path");
    cfg.out_path = value;
  } else if (key == "snapshot-dir") {
    cfg.snapshot_dir = value;
  } else if (key == "init-actor") {
    cfg.init_actor = value;
  } else {
    throw UsageError("unknown key '" + key + "'");
  }
}

}  // namespace

void ApplyConfigText(const std::string& text, ExperimentConfig& cfg) {
  std::stringstream in(text);
  std::string line;
  std::set<std::string> seen;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(number) +
                       ": expected key=value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw UsageError("config line " + std::to_string(number) +
                       ": duplicate key '" + key + "'");
    }
    Apply(key, value, cfg);
  }
}

ExperimentConfig ParseRunArgs(const std::vector<std::string>& args) {
  CLI::App app{"Train an actor on an environment and log learning curves",
               "run"};
  std::string config_file;
  app.add_option("--config", config_file, "key=value config file");
  std::map<std::string, std::string> flags;
  for (const std::string& key : Keys()) {
    app.add_option("--" + key, flags[key]);
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Error& e) {
    throw UsageError(e.what());
  }

  ExperimentConfig cfg;
  if (!config_file.empty()) {
    std::ifstream file(config_file);
    if (!file) throw UsageError("cannot read config file " + config_file);
    std::stringstream text;
    text << file.rdbuf();
    ApplyConfigText(text.str(), cfg);
  }
  for (const std::string& key : Keys()) {
    if (app.get_option("--" + key)->count() > 0) Apply(key, flags[key], cfg);
  }
  return cfg;
}

std::string EnvName(EnvKind env) {
  return env == EnvKind::kLander ? "lander" : "cartpole";
}

std::string AlgoName(AlgoKind algo) {
  switch (algo) {
    case AlgoKind::kBptt:
      return "bptt";
    case AlgoKind::kDhp:
      return "dhp";
    case AlgoKind::kHdp:
      return "hdp";
  }
  return "?";
}

ResolvedConfig Resolve(const ExperimentConfig& cfg) {
  ResolvedConfig r;
  r.env = cfg.env;
  r.algo = cfg.algo;
  r.clip = cfg.clip;
  r.seeds = cfg.seeds;
  r.batch_size = cfg.batch_size;
  r.start_seed = cfg.start_seed;
  r.out_path = cfg.out_path;
  r.snapshot_dir = cfg.snapshot_dir;
  r.init_actor = cfg.init_actor;

  struct Defaults {
    double alpha, beta, sigma, slope;
    int iterations;
  };
  std::optional<Defaults> d;
  if (cfg.env == EnvKind::kLander) {
    r.gamma = cfg.gamma.value_or(1.0);
    r.dt = cfg.dt.value_or(1.0);
    switch (cfg.algo) {
      case AlgoKind::kBptt:
        d = Defaults{0.01, 0.0, 0.0, 1.0, 10000};
        break;
      case AlgoKind::kDhp:
        d = Defaults{0.001, 1e-5, 0.0, 20.0, 10000};
        break;
      case AlgoKind::kHdp:
        d = Defaults{1e-5, 1e-5, 0.1, 10.0, 10000};
        break;
    }
  } else {
    r.gamma = cfg.gamma.value_or(0.97);
    if (cfg.dt) throw UsageError("--dt applies to the lander only");
    r.dt = 0.02;
    switch (cfg.algo) {
      case AlgoKind::kBptt:
        d = Defaults{0.1, 0.0, 0.0, 1.0, 1000};
        break;
      case AlgoKind::kDhp:
        d = Defaults{0.01, 1e-4, 0.0, 0.1, 5000};
        break;
      case AlgoKind::kHdp:
        // No published settings: everything must be given explicitly.
        if (!cfg.alpha || !cfg.beta || !cfg.sigma || !cfg.critic_slope) {
          throw UsageError(
              "cartpole/hdp has no defaults; pass --alpha, --beta, --sigma "
              "and --critic-slope");
        }
        d = Defaults{0.0, 0.0, 0.0, 1.0, 5000};
        break;
    }
  }
  r.alpha = cfg.alpha.value_or(d->alpha);
  r.beta = cfg.beta.value_or(d->beta);
  r.sigma = cfg.sigma.value_or(d->sigma);
  r.critic_slope = cfg.critic_slope.value_or(d->slope);
  r.iterations = cfg.iterations.value_or(d->iterations);
  r.max_steps = cfg.max_steps.value_or(0);
  if (r.algo != AlgoKind::kHdp && r.sigma != 0.0) {
    throw UsageError("--sigma applies to hdp only (bptt and dhp are "
                     "noise-free)");
  }
  return r;
}

}  // namespace clipadp
