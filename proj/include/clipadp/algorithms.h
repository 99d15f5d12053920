#pragma once

#include <optional>
#include <random>
#include <vector>

#include "clipadp/clipping.h"
#include "clipadp/environment.h"
#include "clipadp/mlp.h"
#include "clipadp/trajectory.h"

namespace clipadp {

struct AlgoConfig {
  double actor_lr = 0.01;   // alpha
  double critic_lr = 0.0;   // beta; unused by BPTT
  double gamma = 1.0;
  double noise_std = 0.0;   // HDP exploration only
  bool clip_enabled = true;
  int max_steps = 1000;
  std::vector<State> batch;
};

// Q_x = dU/dx + gamma df/dx p,  Q_u = dU/da + gamma df/da p.
QGradients UnclippedQGradients(const ModelJacobians& jac, const Vec& p_next,
                               double gamma);

// Q-gradients of step (x, a) given p = dJ/dx at the successor. When `clip`
// is set the step is the clipped final transition and phi is the terminal
// impulse at the clipped state; p must then be dphi/dx there.
QGradients StepQGradients(const Environment& env, const State& x,
                          const Action& a, const ClipEvent* clip,
                          const Vec& p_next, double phi, double gamma);

// dJ/dz (dJ^C/dz for clipped trajectories) by backpropagation through time.
Weights BpttGradient(const Trajectory& traj, const Environment& env,
                     const MlpNet& actor, const AlgoConfig& cfg);

struct IterationStats {
  double mean_return = 0.0;
  double mean_duration = 0.0;
};

// Rolls out every start state with the current weights, without updates.
IterationStats EvaluateBatch(const Environment& env, const MlpNet& actor,
                             const AlgoConfig& cfg, std::mt19937_64& rng);

// Batch BPTT: z <- z - alpha * mean over the batch of dJ/dz. Returns stats of
// the trajectories the gradient was computed on.
IterationStats BpttTrainStep(const Environment& env, MlpNet& actor,
                             const AlgoConfig& cfg, std::mt19937_64& rng,
                             Weights* mean_gradient = nullptr);

struct EpisodeResult {
  double return_value = 0.0;
  double duration = 0.0;
};

// One online DHP episode from x0. The critic outputs dJ/dx' in network-input
// coordinates (one output per input feature).
EpisodeResult DhpEpisode(const Environment& env, MlpNet& actor, MlpNet& critic,
                         const State& x0, const AlgoConfig& cfg,
                         std::mt19937_64& rng);

// One online HDP (TD(0)) episode from x0 with a scalar critic.
EpisodeResult HdpEpisode(const Environment& env, MlpNet& actor, MlpNet& critic,
                         const State& x0, const AlgoConfig& cfg,
                         std::mt19937_64& rng);

// One pass of DhpEpisode / HdpEpisode over cfg.batch in order.
IterationStats DhpIteration(const Environment& env, MlpNet& actor,
                            MlpNet& critic, const AlgoConfig& cfg,
                            std::mt19937_64& rng);
IterationStats HdpIteration(const Environment& env, MlpNet& actor,
                            MlpNet& critic, const AlgoConfig& cfg,
                            std::mt19937_64& rng);

}  // namespace clipadp
