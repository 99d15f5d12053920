#include "clipadp/environment.h"

#include <cmath>

namespace clipadp {

Vec NetworkInput(const Environment& env, const State& x) {
  const auto& features = env.InputFeatures();
  Vec in(static_cast<int>(features.size()));
  for (size_t k = 0; k < features.size(); ++k) {
    in[k] = features[k].scale * x[features[k].state_index];
  }
  return in;
}

Vec InputGradToState(const Environment& env, const Vec& input_grad) {
  const auto& features = env.InputFeatures();
  Vec g = Vec::Zero(env.state_dim());
  for (size_t k = 0; k < features.size(); ++k) {
    g[features[k].state_index] += features[k].scale * input_grad[k];
  }
  return g;
}

Vec StateGradToInput(const Environment& env, const Vec& state_grad) {
  const auto& features = env.InputFeatures();
  Vec g(static_cast<int>(features.size()));
  for (size_t k = 0; k < features.size(); ++k) {
    g[k] = state_grad[features[k].state_index] / features[k].scale;
  }
  return g;
}

Action ActorAction(const Environment& env, const MlpNet& actor,
                   const State& x) {
  return env.ActionFromOutput(actor.Forward(NetworkInput(env, x)));
}

Vec ActorBackward(const Environment& env, const MlpNet& actor, const State& x,
                  const Vec& q_u, double scale, Weights* weight_grad) {
  MlpNet::Tape tape;
  actor.Forward(NetworkInput(env, x), tape);
  const Vec cotangent = env.ActionOutputSlope().cwiseProduct(q_u);
  Vec input_grad;
  actor.Backward(tape, cotangent, scale, weight_grad, &input_grad);
  return InputGradToState(env, input_grad);
}

void CheckState(const Environment& env, const State& x, const char* what) {
  if (x.size() != env.state_dim()) {
    throw DimensionError(std::string(what) + ": state has dimension " +
                         std::to_string(x.size()) + ", " + env.name() +
                         " expects " + std::to_string(env.state_dim()));
  }
  if (!x.allFinite()) {
    throw ContractError(std::string(what) + ": state is not finite");
  }
}

void CheckAction(const Environment& env, const Action& a, const char* what) {
  if (a.size() != env.action_dim()) {
    throw DimensionError(std::string(what) + ": action has dimension " +
                         std::to_string(a.size()) + ", " + env.name() +
                         " expects " + std::to_string(env.action_dim()));
  }
  if (!a.allFinite()) {
    throw ContractError(std::string(what) + ": action is not finite");
  }
}

}  // namespace clipadp
