// Acceptance suite: one PASS/FAIL line per criterion.
//
//   clipadp_acceptance            all criteria
//   clipadp_acceptance 1 3 8      selected criteria
//
// Exit status is 0 when every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "clipadp/algorithms.h"
#include "clipadp/envs.h"
#include "clipadp/experiment.h"
#include "clipadp/gradcheck.h"
#include "test_envs.h"

namespace clipadp {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

void Show(const CheckReport& r) { std::printf("    %s\n", r.Line().c_str()); }

Outcome ClippingSuite() {
  std::mt19937_64 rng(1);
  const CheckReport lander =
      CheckClippingDerivatives(Lander(), 100, 1e-6, 1e-5, 1.0, rng);
  const CheckReport lander_disc =
      CheckClippingDerivatives(Lander(), 100, 1e-6, 1e-5, 0.9, rng);
  const CheckReport cartpole =
      CheckClippingDerivatives(CartPole(), 100, 1e-6, 1e-5, 0.97, rng);
  for (const auto* r : {&lander, &lander_disc, &cartpole}) Show(*r);
  const double worst = std::max(
      {lander.max_rel_err, lander_disc.max_rel_err, cartpole.max_rel_err});
  return {lander.pass && lander_disc.pass && cartpole.pass,
          Fmt("max rel err %.2e (tol 1e-5)", worst)};
}

Outcome BpttSuite() {
  std::mt19937_64 rng(1);
  const Lander lander;
  AlgoConfig lcfg;
  lcfg.batch = DrawStartStates(lander, 20130501, 5);
  const CheckReport a = CheckBptt(lander, lcfg, 10, 1e-5, 1e-4, rng);

  const CartPole cartpole;
  AlgoConfig ccfg;
  ccfg.gamma = 0.97;
  ccfg.max_steps = cartpole.DefaultMaxSteps();
  ccfg.batch = DrawStartStates(cartpole, 20130501, 5);
  const CheckReport b = CheckBptt(cartpole, ccfg, 5, 1e-5, 1e-4, rng);
  Show(a);
  Show(b);
  return {a.pass && b.pass,
          Fmt("max rel err %.2e (tol 1e-4), %.0f perturbations skipped",
              std::max(a.max_rel_err, b.max_rel_err), a.skipped + b.skipped)};
}

Outcome ZeroGradient() {
  const CartPole env;
  const ResolvedConfig cfg =
      Resolve(ParseRunArgs({"--env", "cartpole", "--clip", "off"}));
  AlgoConfig algo;
  algo.actor_lr = cfg.alpha;
  algo.gamma = cfg.gamma;
  algo.clip_enabled = false;
  algo.max_steps = env.DefaultMaxSteps();
  algo.batch = DrawStartStates(env, cfg.start_seed, cfg.batch_size);
  long nonzero = 0, checked = 0;
  for (int seed : cfg.seeds) {
    std::mt19937_64 rng(seed);
    MlpNet actor = MlpNet::Random(4, 1, OutputActivation::kTanh, 1.0, rng);
    for (int it = 0; it < cfg.iterations; ++it) {
      Weights g;
      BpttTrainStep(env, actor, algo, rng, &g);
      nonzero += (g.array() != 0.0).count();
      ++checked;
    }
  }
  return {nonzero == 0,
          Fmt("%.0f gradients over 5 seeds, %.0f nonzero components",
              checked, nonzero)};
}

Outcome LambdaOneReduction() {
  std::mt19937_64 rng(1);
  int compared = 0, differing = 0;
  for (int horizon : {1, 3, 10, 40}) {
    const testing::FixedHorizonEnv env(horizon);
    AlgoConfig clip;
    clip.gamma = 0.9;
    clip.max_steps = env.DefaultMaxSteps();
    AlgoConfig noclip = clip;
    noclip.clip_enabled = false;
    for (int k = 0; k < 10; ++k) {
      const MlpNet actor =
          MlpNet::Random(2, 1, OutputActivation::kTanh, 1.0, rng);
      for (int s = 0; s < 5; ++s) {
        const State x0 = env.SampleStart(rng);
        const Trajectory a =
            Unroll(env, actor, x0, {0.9, true, clip.max_steps, 0}, rng);
        const Trajectory b =
            Unroll(env, actor, x0, {0.9, false, clip.max_steps, 0}, rng);
        const bool same =
            a.return_value == b.return_value &&
            BpttGradient(a, env, actor, clip) ==
                BpttGradient(b, env, actor, noclip);
        ++compared;
        if (!same) ++differing;
      }
    }
  }
  return {differing == 0,
          Fmt("%.0f trajectories, %.0f with differing gradients", compared,
              differing)};
}

ResolvedConfig Config(std::vector<std::string> args) {
  return Resolve(ParseRunArgs(args));
}

// First iteration whose mean duration reaches 300, or -1.
int FirstSuccess(const SeedCurve& c) {
  for (const CurveRow& row : c.rows) {
    if (row.mean_duration >= 300.0) return row.iteration;
  }
  return -1;
}

Outcome CartPoleLearning() {
  const ExperimentResult bptt = RunExperiment(Config({"--env", "cartpole"}));
  const ExperimentResult dhp =
      RunExperiment(Config({"--env", "cartpole", "--algo", "dhp"}));
  const ExperimentResult noclip = RunExperiment(
      Config({"--env", "cartpole", "--algo", "dhp", "--clip", "off"}));
  auto count = [](const ExperimentResult& r, const char* label) {
    int n = 0;
    std::printf("    %-12s", label);
    for (const SeedCurve& c : r.curves) {
      const int at = FirstSuccess(c);
      double best = 0;
      for (const CurveRow& row : c.rows) {
        best = std::max(best, row.mean_duration);
      }
      if (at >= 0) {
        ++n;
        std::printf(" seed%d@%d", c.seed, at);
      } else {
        std::printf(" seed%d:max%.1f", c.seed, best);
      }
    }
    std::printf("\n");
    return n;
  };
  const int b = count(bptt, "bptt-clip");
  const int d = count(dhp, "dhp-clip");
  const int n = count(noclip, "dhp-noclip");
  return {b >= 3 && d >= 3 && n == 0,
          Fmt("reached 300: bptt-clip %.0f/5, dhp-clip %.0f/5, ", b, d) +
              Fmt("dhp-noclip %.0f/5", n)};
}

// Criterion-6 style comparison for a lander BPTT run at the given dt.
Outcome LanderComparison(const std::string& dt) {
  const ExperimentResult clip = RunExperiment(Config({"--dt", dt}));
  const ExperimentResult noclip =
      RunExperiment(Config({"--dt", dt, "--clip", "off"}));
  int converged = 0, failed = 0;
  for (size_t i = 0; i < clip.curves.size(); ++i) {
    const double jc = clip.curves[i].rows.back().mean_j;
    const double jn = noclip.curves[i].rows.back().mean_j;
    const bool ok = jc <= 29.0;
    const bool bad = !(jn <= 29.0) || jn > jc;
    converged += ok;
    failed += bad;
    std::printf("    seed%d  clip J=%.3f  noclip J=%.3f\n",
                clip.curves[i].seed, jc, jn);
  }
  return {converged >= 4 && failed >= 3,
          Fmt("clip J<=29 for %.0f/5 seeds, noclip worse or >29 for %.0f/5",
              converged, failed)};
}

Outcome MlpSuite() {
  std::mt19937_64 rng(1);
  const CheckReport a = CheckMlpGradients(3, 1, OutputActivation::kTanh, 1.0,
                                          20, 1e-6, 1e-6, rng);
  const CheckReport b = CheckMlpGradients(4, 4, OutputActivation::kLinear,
                                          20.0, 20, 1e-6, 1e-6, rng);
  Show(a);
  Show(b);
  return {a.pass && b.pass,
          Fmt("max rel err %.2e (tol 1e-6)",
              std::max(a.max_rel_err, b.max_rel_err))};
}

struct Criterion {
  std::string title;
  double time_limit_s;  // 0: no limit
  std::function<Outcome()> run;
};

const std::map<int, Criterion>& Criteria() {
  static const std::map<int, Criterion> c = {
      {1, {"clipping derivatives vs central differences", 10, ClippingSuite}},
      {2, {"BPTT gradient vs central differences", 120, BpttSuite}},
      {3, {"cart-pole unclipped BPTT gradient is zero", 5, ZeroGradient}},
      {4, {"lambda=1 clipped and unclipped gradients agree", 0,
           LambdaOneReduction}},
      {5, {"cart-pole learns with clipping", 900, CartPoleLearning}},
      {6, {"lander dt=1 clipping converges", 0,
           [] { return LanderComparison("1"); }}},
      {7, {"lander dt=0.01 clipping converges", 0,
           [] { return LanderComparison("0.01"); }}},
      {8, {"MLP gradients vs central differences", 5, MlpSuite}},
  };
  return c;
}

}  // namespace
}  // namespace clipadp

int main(int argc, char** argv) {
  using clipadp::Criteria;
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (!Criteria().count(k)) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 1;
    }
    selected.push_back(k);
  }
  if (selected.empty()) {
    for (const auto& [k, c] : Criteria()) selected.push_back(k);
  }
  bool all = true;
  for (int k : selected) {
    const auto& c = Criteria().at(k);
    const auto start = std::chrono::steady_clock::now();
    clipadp::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    bool pass = o.pass;
    if (c.time_limit_s > 0 && secs > c.time_limit_s) {
      pass = false;
      o.detail += "; over time limit";
    }
    std::printf("[%s] %d %s: %s (%.1f s)\n", pass ? "PASS" : "FAIL", k,
                c.title.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && pass;
  }
  return all ? 0 : 1;
}
