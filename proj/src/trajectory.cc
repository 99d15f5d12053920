#include "clipadp/trajectory.h"

#include <string>

#include "clipadp/clipping.h"

namespace clipadp {

double Trajectory::duration() const {
  const double lambda = clip ? clip->lambda : 1.0;
  return static_cast<double>(length() - 1) + lambda;
}

void ReturnAccumulator::AddTerminal(double phi, double lambda) {
  total_ += last_discount_ * FractionalDiscount(gamma_, lambda) * phi;
}

Transition Advance(const Environment& env, const State& x, const Action& a,
                   bool clip_enabled, int t) {
  Transition tr;
  tr.next = env.Model(x, a);
  tr.cost = env.Cost(x, a);
  tr.terminal = env.IsTerminal(tr.next);
  if (tr.terminal && clip_enabled) {
    ClipEvent ev;
    ev.plane = env.Boundary(x, tr.next);
    ev.penultimate_index = t;
    ev.unclipped_next = tr.next;
    ev.unclipped_cost = tr.cost;
    ClippedStep cs = ClippedTransition(x, tr.next, tr.cost, ev.plane);
    ev.lambda = cs.lambda;
    if (ev.lambda <= 0.0) {
      throw ContractError("clipping fraction is zero: step starts on the "
                          "terminal boundary");
    }
    tr.next = std::move(cs.next);
    tr.cost = cs.cost;
    tr.clip = std::move(ev);
  }
  return tr;
}

Trajectory Unroll(const Environment& env, const MlpNet& actor, const State& x0,
                  const UnrollOptions& options, std::mt19937_64& rng) {
  CheckState(env, x0, "Unroll");
  if (env.IsTerminal(x0)) throw ContractError("Unroll: x0 is terminal");
  if (!(options.gamma > 0.0 && options.gamma <= 1.0)) {
    throw ContractError("Unroll: gamma must lie in (0, 1]");
  }
  if (options.max_steps < 1) throw ContractError("Unroll: max_steps < 1");
  if (options.noise_std < 0.0) throw ContractError("Unroll: noise_std < 0");

  std::normal_distribution<double> noise(0.0, 1.0);
  Trajectory traj;
  traj.gamma = options.gamma;
  traj.states.push_back(x0);
  ReturnAccumulator acc(options.gamma);
  for (int t = 0;; ++t) {
    if (t >= options.max_steps) {
      throw TruncationError("Unroll: no terminal state within " +
                            std::to_string(options.max_steps) + " steps");
    }
    const State& x = traj.states.back();
    Action a = ActorAction(env, actor, x);
    if (options.noise_std > 0.0) {
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        a[i] += options.noise_std * noise(rng);
      }
    }
    Transition tr = Advance(env, x, a, options.clip_enabled, t);
    traj.actions.push_back(std::move(a));
    traj.step_costs.push_back(tr.cost);
    acc.AddStep(tr.cost);
    traj.states.push_back(std::move(tr.next));
    if (tr.terminal) {
      traj.clip = std::move(tr.clip);
      break;
    }
  }
  traj.terminal_cost = env.TerminalCost(traj.states.back());
  acc.AddTerminal(traj.terminal_cost, traj.clip ? traj.clip->lambda : 1.0);
  traj.return_value = acc.value();
  return traj;
}

double EvaluateReturn(const Trajectory& traj, double gamma) {
  ReturnAccumulator acc(gamma);
  for (double c : traj.step_costs) acc.AddStep(c);
  acc.AddTerminal(traj.terminal_cost, traj.clip ? traj.clip->lambda : 1.0);
  return acc.value();
}

}  // namespace clipadp
