#pragma once

#include <random>
#include <string>
#include <vector>

#include "clipadp/mlp.h"
#include "clipadp/types.h"

namespace clipadp {

// One component of a network input vector: scale * x[state_index].
struct InputFeature {
  int state_index;
  double scale;
};

// Deterministic, episodic environment with analytic model and cost
// derivatives. All methods are const and side-effect free.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;

  // x_{t+1} = f(x_t, a_t)
  virtual State Model(const State& x, const Action& a) const = 0;
  // U(x_t, a_t)
  virtual double Cost(const State& x, const Action& a) const = 0;
  virtual ModelJacobians Jacobians(const State& x, const Action& a) const = 0;

  // Terminal impulse phi(x) and its gradient.
  virtual double TerminalCost(const State& x) const = 0;
  virtual Vec TerminalCostGradient(const State& x) const = 0;

  virtual bool IsTerminal(const State& x) const = 0;

  // Tangent plane of the boundary first crossed on the straight segment
  // from `from` (non-terminal) to `to` (terminal). Throws ContractError if
  // no plane is crossed.
  virtual Plane Boundary(const State& from, const State& to) const = 0;

  // Network input x' = features applied to x; linear in x.
  virtual const std::vector<InputFeature>& InputFeatures() const = 0;

  // Maps actor output y to an action; must be affine with diagonal slope.
  virtual Action ActionFromOutput(const Vec& y) const = 0;
  virtual Vec ActionOutputSlope() const = 0;

  virtual int DefaultMaxSteps() const = 0;
  virtual double DefaultGamma() const = 0;

  virtual State SampleStart(std::mt19937_64& rng) const = 0;

  // A non-terminal state near some boundary and an action, used by the
  // derivative checks to find boundary-crossing transitions.
  virtual std::pair<State, Action> SampleNearBoundary(
      std::mt19937_64& rng) const = 0;
};

Vec NetworkInput(const Environment& env, const State& x);

// Pulls a gradient w.r.t. the network input back to state coordinates.
Vec InputGradToState(const Environment& env, const Vec& input_grad);

// Converts a state-space gradient to network-input coordinates (inverse of
// InputGradToState on the featured components).
Vec StateGradToInput(const Environment& env, const Vec& state_grad);

// A(x, z): actor output mapped to an action.
Action ActorAction(const Environment& env, const MlpNet& actor,
                   const State& x);

// Products with the actor Jacobians for q_u, evaluated at x:
//   dA/dz q_u added (times `scale`) into weight_grad (if non-null),
//   dA/dx q_u returned in state coordinates.
Vec ActorBackward(const Environment& env, const MlpNet& actor, const State& x,
                  const Vec& q_u, double scale, Weights* weight_grad);

void CheckState(const Environment& env, const State& x, const char* what);
void CheckAction(const Environment& env, const Action& a, const char* what);

}  // namespace clipadp
