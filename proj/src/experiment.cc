#include "clipadp/experiment.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "clipadp/algorithms.h"
#include "clipadp/envs.h"
#include "clipadp/mlp.h"

namespace clipadp {

std::unique_ptr<Environment> MakeEnvironment(const ResolvedConfig& cfg) {
  if (cfg.env == EnvKind::kLander) {
    LanderParams params;
    params.dt = cfg.dt;
    return std::make_unique<Lander>(params);
  }
  return std::make_unique<CartPole>();
}

std::vector<State> DrawStartStates(const Environment& env,
                                   std::uint64_t start_seed, int count) {
  std::mt19937_64 rng(start_seed);
  std::vector<State> starts;
  starts.reserve(count);
  for (int i = 0; i < count; ++i) starts.push_back(env.SampleStart(rng));
  return starts;
}

SeedCurve RunSeed(const ResolvedConfig& cfg, int seed) {
  const auto env = MakeEnvironment(cfg);
  const int n_in = static_cast<int>(env->InputFeatures().size());

  AlgoConfig algo;
  algo.actor_lr = cfg.alpha;
  algo.critic_lr = cfg.beta;
  algo.gamma = cfg.gamma;
  algo.noise_std = cfg.sigma;
  algo.clip_enabled = cfg.clip;
  algo.max_steps = cfg.max_steps > 0 ? cfg.max_steps : env->DefaultMaxSteps();
  algo.batch = DrawStartStates(*env, cfg.start_seed, cfg.batch_size);
  AlgoConfig eval = algo;
  eval.noise_std = 0.0;

  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  MlpNet actor = MlpNet::Random(n_in, env->action_dim(),
                                OutputActivation::kTanh, 1.0, rng);
  if (!cfg.init_actor.empty()) {
    actor = MlpNet::Load(cfg.init_actor);
    if (actor.n_in() != n_in || actor.n_out() != env->action_dim() ||
        actor.output_activation() != OutputActivation::kTanh) {
      throw Error(cfg.init_actor + " does not fit the " + EnvName(cfg.env) +
                  " actor");
    }
  }
  std::optional<MlpNet> critic;
  if (cfg.algo == AlgoKind::kDhp) {
    critic = MlpNet::Random(n_in, n_in, OutputActivation::kLinear,
                            cfg.critic_slope, rng);
  } else if (cfg.algo == AlgoKind::kHdp) {
    critic = MlpNet::Random(n_in, 1, OutputActivation::kLinear,
                            cfg.critic_slope, rng);
  }

  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  SeedCurve curve;
  curve.seed = seed;
  curve.rows.reserve(cfg.iterations + 1);
  for (int k = 0; k <= cfg.iterations; ++k) {
    const bool update = k < cfg.iterations;
    IterationStats stats{kNaN, kNaN};
    try {
      if (update && cfg.algo == AlgoKind::kBptt) {
        // The unrolled trajectories are those of the pre-update weights.
        stats = BpttTrainStep(*env, actor, algo, rng);
      } else {
        stats = EvaluateBatch(*env, actor, eval, rng);
        if (update && cfg.algo == AlgoKind::kDhp) {
          DhpIteration(*env, actor, *critic, algo, rng);
        } else if (update && cfg.algo == AlgoKind::kHdp) {
          HdpIteration(*env, actor, *critic, algo, rng);
        }
      }
    } catch (const TruncationError&) {
      stats = {kNaN, kNaN};
      ++curve.truncated;
    }
    curve.rows.push_back({k, stats.mean_return, stats.mean_duration});
  }
  curve.final_actor = actor.weights();
  if (!cfg.snapshot_dir.empty()) {
    const std::filesystem::path dir(cfg.snapshot_dir);
    std::filesystem::create_directories(dir);
    const std::string tag = "_seed" + std::to_string(seed) + ".txt";
    actor.Save((dir / ("actor" + tag)).string());
    if (critic) critic->Save((dir / ("critic" + tag)).string());
  }
  return curve;
}

ExperimentResult RunExperiment(const ResolvedConfig& cfg) {
  ExperimentResult result{cfg, {}};
  for (int seed : cfg.seeds) result.curves.push_back(RunSeed(cfg, seed));
  return result;
}

namespace {

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string CurvesToCsv(const ResolvedConfig& cfg,
                        const std::vector<SeedCurve>& curves) {
  std::ostringstream out;
  out << "iteration,seed,mean_J,mean_duration\n";
  for (const SeedCurve& curve : curves) {
    for (const CurveRow& row : curve.rows) {
      out << row.iteration << ',' << curve.seed << ','
          << FormatDouble(row.mean_j) << ',';
      if (cfg.env == EnvKind::kCartPole) out << FormatDouble(row.mean_duration);
      out << '\n';
    }
  }
  return out.str();
}

namespace {

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path);
  if (!file) throw Error("cannot open " + path.string() + " for writing");
  file << text;
  if (!file) throw Error("failed writing " + path.string());
}

}  // namespace

std::vector<std::string> WriteCsv(const ExperimentResult& result) {
  const std::filesystem::path out(result.config.out_path);
  std::vector<std::string> written;
  for (const SeedCurve& curve : result.curves) {
    std::filesystem::path path = out;
    path.replace_filename(out.stem().string() + "_seed" +
                          std::to_string(curve.seed) +
                          out.extension().string());
    WriteFile(path, CurvesToCsv(result.config, {curve}));
    written.push_back(path.string());
  }
  WriteFile(out, CurvesToCsv(result.config, result.curves));
  written.push_back(out.string());
  return written;
}

}  // namespace clipadp
