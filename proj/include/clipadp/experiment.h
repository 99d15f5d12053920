#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "clipadp/environment.h"
#include "clipadp/types.h"

namespace clipadp {

enum class EnvKind { kLander, kCartPole };
enum class AlgoKind { kBptt, kDhp, kHdp };

// Malformed command line or config file.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Experiment settings. Unset optionals take the per-experiment defaults
// (see Resolve).
struct ExperimentConfig {
  EnvKind env = EnvKind::kLander;
  AlgoKind algo = AlgoKind::kBptt;
  bool clip = true;
  std::optional<int> iterations;
  std::vector<int> seeds = {1, 2, 3, 4, 5};
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> gamma;
  std::optional<double> sigma;
  std::optional<double> dt;
  std::optional<double> critic_slope;
  std::optional<int> max_steps;
  int batch_size = 5;
  // Seed of the fixed start states, shared by all weight-init seeds.
  std::uint64_t start_seed = 20130501;
  std::string out_path = "learning_curve.csv";
  // Final actor (and critic) snapshots are written here when set.
  std::string snapshot_dir;
  // Initial actor weights for every seed, instead of a random draw.
  std::string init_actor;
};

// Config with every default filled in.
struct ResolvedConfig {
  EnvKind env;
  AlgoKind algo;
  bool clip;
  int iterations;
  std::vector<int> seeds;
  double alpha;
  double beta;
  double gamma;
  double sigma;
  double dt;
  double critic_slope;
  int max_steps;
  int batch_size;
  std::uint64_t start_seed;
  std::string out_path;
  std::string snapshot_dir;
  std::string init_actor;
};

ResolvedConfig Resolve(const ExperimentConfig& cfg);

std::string EnvName(EnvKind env);
std::string AlgoName(AlgoKind algo);

// Parses arguments of the `run` subcommand (everything after "run"). Flags
// override values from --config FILE, which override defaults. Throws
// UsageError on malformed, unknown or duplicated options.
ExperimentConfig ParseRunArgs(const std::vector<std::string>& args);

// Applies `key=value` lines (blank lines and '#' comments ignored) onto cfg.
void ApplyConfigText(const std::string& text, ExperimentConfig& cfg);

std::unique_ptr<Environment> MakeEnvironment(const ResolvedConfig& cfg);

// `count` start states drawn from env.SampleStart with a dedicated stream.
std::vector<State> DrawStartStates(const Environment& env,
                                   std::uint64_t start_seed, int count);

struct CurveRow {
  int iteration;
  double mean_j;  // NaN for truncated iterations
  double mean_duration;
};

struct SeedCurve {
  int seed;
  std::vector<CurveRow> rows;  // iterations + 1 rows; the last is a final
                               // evaluation with no update
  int truncated = 0;
  Weights final_actor;
};

struct ExperimentResult {
  ResolvedConfig config;
  std::vector<SeedCurve> curves;
};

SeedCurve RunSeed(const ResolvedConfig& cfg, int seed);
ExperimentResult RunExperiment(const ResolvedConfig& cfg);

// Header `iteration,seed,mean_J,mean_duration`; rows ordered by (seed,
// iteration). mean_duration is empty for the lander.
std::string CurvesToCsv(const ResolvedConfig& cfg,
                        const std::vector<SeedCurve>& curves);

// Writes one CSV per seed (<stem>_seed<k><ext>) and the combined file at
// cfg.out_path. Returns the paths written, combined file last.
std::vector<std::string> WriteCsv(const ExperimentResult& result);

}  // namespace clipadp
