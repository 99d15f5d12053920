#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clipadp/algorithms.h"
#include "clipadp/envs.h"
#include "clipadp/experiment.h"
#include "clipadp/gradcheck.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

const char* kUsage =
    "usage: clipadp <command> [options]\n"
    "\n"
    "commands:\n"
    "  run        train actors and write learning-curve CSVs\n"
    "  gradcheck  compare analytic derivatives with central differences\n"
    "\n"
    "Run `clipadp <command> --help` for the options of a command.\n";

int Run(const std::vector<std::string>& args) {
  for (const std::string& a : args) {
    if (a == "--help" || a == "-h") {
      std::cout
          << "usage: clipadp run [--config FILE] [--KEY VALUE ...]\n"
             "\n"
             "keys (also accepted as KEY=VALUE lines in the config file):\n"
             "  env           lander | cartpole            (lander)\n"
             "  algo          bptt | dhp | hdp              (bptt)\n"
             "  clip          on | off                      (on)\n"
             "  iterations    training iterations\n"
             "  seeds         comma-separated weight seeds  (1,2,3,4,5)\n"
             "  alpha beta gamma sigma dt critic-slope\n"
             "  max-steps     unroll limit per trajectory\n"
             "  batch-size    start states per iteration    (5)\n"
             "  start-seed    seed of the start states\n"
             "  out           combined CSV path             "
             "(learning_curve.csv)\n"
             "  snapshot-dir  write final actor/critic weights here\n"
             "  init-actor    load initial actor weights\n";
      return kExitOk;
    }
  }
  clipadp::ResolvedConfig cfg;
  try {
    cfg = clipadp::Resolve(clipadp::ParseRunArgs(args));
  } catch (const clipadp::UsageError& e) {
    std::cerr << "clipadp run: " << e.what() << "\n";
    return kExitUsage;
  }

  const clipadp::ExperimentResult result = clipadp::RunExperiment(cfg);
  for (const std::string& path : clipadp::WriteCsv(result)) {
    std::cerr << "wrote " << path << "\n";
  }
  int status = kExitOk;
  const int rows = cfg.iterations + 1;
  for (const clipadp::SeedCurve& curve : result.curves) {
    const clipadp::CurveRow& last = curve.rows.back();
    std::printf("seed %d: final J=%.6g duration=%.6g truncated=%d/%d\n",
                curve.seed, last.mean_j, last.mean_duration, curve.truncated,
                rows);
    if (2 * curve.truncated > rows) {
      std::cerr << "clipadp run: seed " << curve.seed
                << ": more than half of the iterations hit max-steps\n";
      status = kExitRuntime;
    }
  }
  return status;
}

int GradCheck(const std::vector<std::string>& args) {
  CLI::App app{"Compare analytic derivatives with central differences",
               "gradcheck"};
  std::string env_name = "all";
  int samples = 100;
  int inits = 0;
  std::uint64_t seed = 1;
  app.add_option("--env", env_name, "lander | cartpole | all")
      ->check(CLI::IsMember({"lander", "cartpole", "all"}));
  app.add_option("--samples", samples, "transitions per clipping check")
      ->check(CLI::Range(1, 1000000));
  app.add_option("--inits", inits,
                 "random actors per BPTT check (0: 10 lander, 5 cart-pole)")
      ->check(CLI::Range(0, 1000));
  app.add_option("--seed", seed, "random seed");
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::Error& e) {
    std::cerr << "clipadp gradcheck: " << e.what() << "\n";
    return kExitUsage;
  }

  std::mt19937_64 rng(seed);
  std::vector<clipadp::CheckReport> reports;
  const bool lander = env_name != "cartpole";
  const bool cartpole = env_name != "lander";
  if (lander) {
    const clipadp::Lander env;
    reports.push_back(clipadp::CheckModelJacobians(env, samples, 1e-6, 1e-5,
                                                   rng));
    reports.push_back(clipadp::CheckClippingDerivatives(env, samples, 1e-6,
                                                        1e-5, 1.0, rng));
    reports.push_back(clipadp::CheckClippingDerivatives(env, samples, 1e-6,
                                                        1e-5, 0.9, rng));
    clipadp::AlgoConfig cfg;
    cfg.gamma = 1.0;
    cfg.max_steps = env.DefaultMaxSteps();
    cfg.batch = clipadp::DrawStartStates(env, seed, 5);
    reports.push_back(clipadp::CheckBptt(env, cfg, inits > 0 ? inits : 10,
                                         1e-5, 1e-4, rng));
  }
  if (cartpole) {
    const clipadp::CartPole env;
    reports.push_back(clipadp::CheckModelJacobians(env, samples, 1e-6, 1e-5,
                                                   rng));
    reports.push_back(clipadp::CheckClippingDerivatives(
        env, samples, 1e-6, 1e-5, env.DefaultGamma(), rng));
    clipadp::AlgoConfig cfg;
    cfg.gamma = env.DefaultGamma();
    cfg.max_steps = env.DefaultMaxSteps();
    cfg.batch = clipadp::DrawStartStates(env, seed, 5);
    reports.push_back(clipadp::CheckBptt(env, cfg, inits > 0 ? inits : 5,
                                         1e-5, 1e-4, rng));
    cfg.clip_enabled = false;
    reports.push_back(clipadp::CheckBptt(env, cfg, inits > 0 ? inits : 5,
                                         1e-5, 1e-4, rng));
  }
  reports.push_back(clipadp::CheckMlpGradients(
      3, 1, clipadp::OutputActivation::kTanh, 1.0, 20, 1e-6, 1e-6, rng));
  reports.push_back(clipadp::CheckMlpGradients(
      4, 4, clipadp::OutputActivation::kLinear, 0.1, 20, 1e-6, 1e-6, rng));

  bool all_pass = true;
  for (const clipadp::CheckReport& r : reports) {
    std::printf("%s\n", r.Line().c_str());
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return kExitUsage;
  }
  const std::string command = argv[1];
  const std::vector<std::string> args(argv + 2, argv + argc);
  try {
    if (command == "run") return Run(args);
    if (command == "gradcheck") return GradCheck(args);
    if (command == "--help" || command == "-h" || command == "help") {
      std::cout << kUsage;
      return kExitOk;
    }
    std::cerr << "clipadp: unknown command '" << command << "'\n" << kUsage;
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "clipadp " << command << ": " << e.what() << "\n";
    return kExitRuntime;
  }
}
