#include "clipadp/algorithms.h"

#include <string>

namespace clipadp {

namespace {

void CheckConfig(const AlgoConfig& cfg) {
  if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0)) {
    throw ContractError("gamma must lie in (0, 1]");
  }
  if (cfg.actor_lr < 0.0 || cfg.critic_lr < 0.0 || cfg.noise_std < 0.0) {
    throw ContractError("learning rates and noise_std must be non-negative");
  }
  if (cfg.batch.empty()) throw ContractError("batch of start states is empty");
  if (cfg.max_steps < 1) throw ContractError("max_steps must be positive");
}

UnrollOptions ToUnroll(const AlgoConfig& cfg) {
  return {cfg.gamma, cfg.clip_enabled, cfg.max_steps, cfg.noise_std};
}

void CheckCritic(const Environment& env, const MlpNet& critic, int n_out) {
  const int n_in = static_cast<int>(env.InputFeatures().size());
  if (critic.n_in() != n_in || critic.n_out() != n_out) {
    throw DimensionError("critic must map " + std::to_string(n_in) +
                         " inputs to " + std::to_string(n_out) + " outputs");
  }
}

}  // namespace

QGradients UnclippedQGradients(const ModelJacobians& jac, const Vec& p_next,
                               double gamma) {
  if (p_next.size() != jac.df_dx.cols()) {
    throw DimensionError("p has wrong dimension for the model Jacobian");
  }
  QGradients q;
  Vec fx = jac.df_dx * p_next;
  Vec fa = jac.df_da * p_next;
  q.q_x = jac.dU_dx + gamma * fx;
  q.q_u = jac.dU_da + gamma * fa;
  return q;
}

QGradients StepQGradients(const Environment& env, const State& x,
                          const Action& a, const ClipEvent* clip,
                          const Vec& p_next, double phi, double gamma) {
  const ModelJacobians jac = env.Jacobians(x, a);
  if (clip == nullptr) return UnclippedQGradients(jac, p_next, gamma);
  const ClippedJacobians cj = ComputeClippedJacobians(
      x, clip->unclipped_next, clip->unclipped_cost, jac, clip->plane);
  return ClippedQGradients(cj, phi, p_next, gamma);
}

Weights BpttGradient(const Trajectory& traj, const Environment& env,
                     const MlpNet& actor, const AlgoConfig& cfg) {
  if (cfg.noise_std != 0.0) {
    throw ContractError("BPTT requires noise-free trajectories");
  }
  if (traj.clip.has_value() != cfg.clip_enabled) {
    throw ContractError("trajectory clipping does not match clip_enabled");
  }
  const int T = traj.length();
  if (T < 1 || static_cast<int>(traj.states.size()) != T + 1) {
    throw ContractError("malformed trajectory");
  }
  std::vector<double> discount(T);
  double d = 1.0;
  for (int t = 0; t < T; ++t) {
    discount[t] = d;
    d *= cfg.gamma;
  }

  Weights grad = Weights::Zero(actor.weights().size());
  Vec p = env.TerminalCostGradient(traj.states[T]);
  for (int t = T - 1; t >= 0; --t) {
    const ClipEvent* clip =
        (t == T - 1 && traj.clip) ? &*traj.clip : nullptr;
    const QGradients q =
        StepQGradients(env, traj.states[t], traj.actions[t], clip, p,
                       traj.terminal_cost, cfg.gamma);
    const Vec ax_qu = ActorBackward(env, actor, traj.states[t], q.q_u,
                                    discount[t], &grad);
    p = q.q_x + ax_qu;
  }
  return grad;
}

IterationStats EvaluateBatch(const Environment& env, const MlpNet& actor,
                             const AlgoConfig& cfg, std::mt19937_64& rng) {
  CheckConfig(cfg);
  IterationStats stats;
  for (const State& x0 : cfg.batch) {
    const Trajectory traj = Unroll(env, actor, x0, ToUnroll(cfg), rng);
    stats.mean_return += traj.return_value;
    stats.mean_duration += traj.duration();
  }
  const double n = static_cast<double>(cfg.batch.size());
  stats.mean_return /= n;
  stats.mean_duration /= n;
  return stats;
}

IterationStats BpttTrainStep(const Environment& env, MlpNet& actor,
                             const AlgoConfig& cfg, std::mt19937_64& rng,
                             Weights* mean_gradient) {
  CheckConfig(cfg);
  Weights sum = Weights::Zero(actor.weights().size());
  IterationStats stats;
  for (const State& x0 : cfg.batch) {
    const Trajectory traj = Unroll(env, actor, x0, ToUnroll(cfg), rng);
    sum += BpttGradient(traj, env, actor, cfg);
    stats.mean_return += traj.return_value;
    stats.mean_duration += traj.duration();
  }
  const double n = static_cast<double>(cfg.batch.size());
  stats.mean_return /= n;
  stats.mean_duration /= n;
  sum /= n;
  actor.mutable_weights() -= cfg.actor_lr * sum;
  if (mean_gradient != nullptr) *mean_gradient = std::move(sum);
  return stats;
}

EpisodeResult DhpEpisode(const Environment& env, MlpNet& actor, MlpNet& critic,
                         const State& x0, const AlgoConfig& cfg,
                         std::mt19937_64& rng) {
  CheckState(env, x0, "DhpEpisode");
  if (env.IsTerminal(x0)) throw ContractError("DhpEpisode: x0 is terminal");
  const int n_in = static_cast<int>(env.InputFeatures().size());
  CheckCritic(env, critic, n_in);

  std::normal_distribution<double> noise(0.0, 1.0);
  Weights actor_grad(actor.weights().size());
  Weights critic_grad(critic.weights().size());
  ReturnAccumulator acc(cfg.gamma);
  State x = x0;
  EpisodeResult result;
  for (int t = 0;; ++t) {
    if (t >= cfg.max_steps) {
      throw TruncationError("DhpEpisode: no terminal state within " +
                            std::to_string(cfg.max_steps) + " steps");
    }
    Action a = ActorAction(env, actor, x);
    if (cfg.noise_std > 0.0) {
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        a[i] += cfg.noise_std * noise(rng);
      }
    }
    Transition tr = Advance(env, x, a, cfg.clip_enabled, t);
    acc.AddStep(tr.cost);

    Vec p;
    double phi = 0.0;
    if (tr.terminal) {
      phi = env.TerminalCost(tr.next);
      p = env.TerminalCostGradient(tr.next);
    } else {
      p = InputGradToState(env, critic.Forward(NetworkInput(env, tr.next)));
    }
    const QGradients q = StepQGradients(
        env, x, a, tr.clip ? &*tr.clip : nullptr, p, phi, cfg.gamma);

    actor_grad.setZero();
    const Vec ax_qu = ActorBackward(env, actor, x, q.q_u, 1.0, &actor_grad);
    const Vec target = StateGradToInput(env, q.q_x + ax_qu);

    MlpNet::Tape tape;
    const Vec g = critic.Forward(NetworkInput(env, x), tape);
    critic_grad.setZero();
    critic.Backward(tape, target - g, 1.0, &critic_grad, nullptr);
    critic.mutable_weights() += cfg.critic_lr * critic_grad;
    actor.mutable_weights() -= cfg.actor_lr * actor_grad;

    if (tr.terminal) {
      acc.AddTerminal(phi, tr.clip ? tr.clip->lambda : 1.0);
      result.duration = t + (tr.clip ? tr.clip->lambda : 1.0);
      break;
    }
    x = std::move(tr.next);
  }
  result.return_value = acc.value();
  return result;
}

EpisodeResult HdpEpisode(const Environment& env, MlpNet& actor, MlpNet& critic,
                         const State& x0, const AlgoConfig& cfg,
                         std::mt19937_64& rng) {
  CheckState(env, x0, "HdpEpisode");
  if (env.IsTerminal(x0)) throw ContractError("HdpEpisode: x0 is terminal");
  CheckCritic(env, critic, 1);

  std::normal_distribution<double> noise(0.0, 1.0);
  const Vec one = Vec::Ones(1);
  Weights actor_grad(actor.weights().size());
  Weights critic_grad(critic.weights().size());
  ReturnAccumulator acc(cfg.gamma);
  State x = x0;
  EpisodeResult result;
  for (int t = 0;; ++t) {
    if (t >= cfg.max_steps) {
      throw TruncationError("HdpEpisode: no terminal state within " +
                            std::to_string(cfg.max_steps) + " steps");
    }
    Action a = ActorAction(env, actor, x);
    if (cfg.noise_std > 0.0) {
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        a[i] += cfg.noise_std * noise(rng);
      }
    }
    Transition tr = Advance(env, x, a, cfg.clip_enabled, t);
    acc.AddStep(tr.cost);

    Vec p;
    double v_next;
    double phi = 0.0;
    if (tr.terminal) {
      phi = env.TerminalCost(tr.next);
      v_next = phi;
      p = env.TerminalCostGradient(tr.next);
    } else {
      MlpNet::Tape next_tape;
      const Vec in_next = NetworkInput(env, tr.next);
      v_next = critic.Forward(in_next, next_tape)[0];
      Vec dv;
      critic.Backward(next_tape, one, 1.0, nullptr, &dv);
      p = InputGradToState(env, dv);
    }
    const double lambda = tr.clip ? tr.clip->lambda : 1.0;
    const QGradients q = StepQGradients(
        env, x, a, tr.clip ? &*tr.clip : nullptr, p, phi, cfg.gamma);

    MlpNet::Tape tape;
    const double v = critic.Forward(NetworkInput(env, x), tape)[0];
    const double td =
        tr.cost + FractionalDiscount(cfg.gamma, lambda) * v_next - v;
    critic_grad.setZero();
    critic.Backward(tape, one, 1.0, &critic_grad, nullptr);
    actor_grad.setZero();
    ActorBackward(env, actor, x, q.q_u, 1.0, &actor_grad);
    critic.mutable_weights() += (cfg.critic_lr * td) * critic_grad;
    actor.mutable_weights() -= cfg.actor_lr * actor_grad;

    if (tr.terminal) {
      acc.AddTerminal(phi, lambda);
      result.duration = t + lambda;
      break;
    }
    x = std::move(tr.next);
  }
  result.return_value = acc.value();
  return result;
}

namespace {

template <typename Episode>
IterationStats RunPass(const AlgoConfig& cfg, Episode&& episode) {
  CheckConfig(cfg);
  IterationStats stats;
  for (const State& x0 : cfg.batch) {
    const EpisodeResult r = episode(x0);
    stats.mean_return += r.return_value;
    stats.mean_duration += r.duration;
  }
  const double n = static_cast<double>(cfg.batch.size());
  stats.mean_return /= n;
  stats.mean_duration /= n;
  return stats;
}

}  // namespace

IterationStats DhpIteration(const Environment& env, MlpNet& actor,
                            MlpNet& critic, const AlgoConfig& cfg,
                            std::mt19937_64& rng) {
  return RunPass(cfg, [&](const State& x0) {
    return DhpEpisode(env, actor, critic, x0, cfg, rng);
  });
}

IterationStats HdpIteration(const Environment& env, MlpNet& actor,
                            MlpNet& critic, const AlgoConfig& cfg,
                            std::mt19937_64& rng) {
  return RunPass(cfg, [&](const State& x0) {
    return HdpEpisode(env, actor, critic, x0, cfg, rng);
  });
}

}  // namespace clipadp
