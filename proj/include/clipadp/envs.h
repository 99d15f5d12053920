#pragma once

#include <numbers>
#include <utility>
#include <vector>

#include "clipadp/environment.h"

namespace clipadp {

struct LanderParams {
  double k_g = 0.2;  // gravity, acceleration per step^2
  double k_f = 4.0;  // fuel penalty
  double k_u = 1.0;  // fuel unit conversion
  double mass = 2.0;
  double dt = 1.0;
  // 0 selects 1000 time units, i.e. ceil(1000 / dt) steps.
  int max_steps = 0;
};

// Vertical lander. State (h, v, u): height, velocity, fuel. Action a is the
// upward thrust acceleration. Terminates on h <= 0 or u <= 0 with impulse
// phi = m v^2 / 2 + m k_g h.
class Lander final : public Environment {
 public:
  static constexpr int kHeight = 0;
  static constexpr int kVelocity = 1;
  static constexpr int kFuel = 2;
  // Rejects actions far outside [0, 1].
  static constexpr double kActionSanity = 10.0;

  explicit Lander(LanderParams params = {});

  const LanderParams& params() const { return params_; }

  std::string name() const override { return "lander"; }
  int state_dim() const override { return 3; }
  int action_dim() const override { return 1; }

  State Model(const State& x, const Action& a) const override;
  double Cost(const State& x, const Action& a) const override;
  ModelJacobians Jacobians(const State& x, const Action& a) const override;
  double TerminalCost(const State& x) const override;
  Vec TerminalCostGradient(const State& x) const override;
  bool IsTerminal(const State& x) const override;
  Plane Boundary(const State& from, const State& to) const override;
  const std::vector<InputFeature>& InputFeatures() const override {
    return features_;
  }
  Action ActionFromOutput(const Vec& y) const override;
  Vec ActionOutputSlope() const override;
  int DefaultMaxSteps() const override;
  double DefaultGamma() const override { return 1.0; }
  State SampleStart(std::mt19937_64& rng) const override;
  std::pair<State, Action> SampleNearBoundary(
      std::mt19937_64& rng) const override;

  static Plane GroundPlane();
  static Plane FuelPlane();

 private:
  void CheckAction(const Action& a) const;

  LanderParams params_;
  std::vector<InputFeature> features_;
};

struct CartPoleParams {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double half_length = 0.5;
  double force_mag = 10.0;
  double dt = 0.02;
  double angle_limit = std::numbers::pi / 15.0;
  double track_limit = 2.4;
  int horizon = 300;
};

// Frictionless cart-pole, explicit Euler. State (x, theta, x_dot,
// theta_dot, t) with t counting steps. Cost is the duration-based
// gamma^T: no running cost and a unit impulse at every terminal state, so
// with clipping J = gamma^(fractional T).
class CartPole final : public Environment {
 public:
  static constexpr int kX = 0;
  static constexpr int kTheta = 1;
  static constexpr int kXDot = 2;
  static constexpr int kThetaDot = 3;
  static constexpr int kTime = 4;

  explicit CartPole(CartPoleParams params = {});

  const CartPoleParams& params() const { return params_; }

  std::string name() const override { return "cartpole"; }
  int state_dim() const override { return 5; }
  int action_dim() const override { return 1; }

  State Model(const State& x, const Action& a) const override;
  double Cost(const State& x, const Action& a) const override;
  ModelJacobians Jacobians(const State& x, const Action& a) const override;
  double TerminalCost(const State& x) const override;
  Vec TerminalCostGradient(const State& x) const override;
  bool IsTerminal(const State& x) const override;
  Plane Boundary(const State& from, const State& to) const override;
  const std::vector<InputFeature>& InputFeatures() const override {
    return features_;
  }
  Action ActionFromOutput(const Vec& y) const override;
  Vec ActionOutputSlope() const override;
  int DefaultMaxSteps() const override { return params_.horizon + 1; }
  double DefaultGamma() const override { return 0.97; }
  State SampleStart(std::mt19937_64& rng) const override;
  std::pair<State, Action> SampleNearBoundary(
      std::mt19937_64& rng) const override;

  // Boundary planes in state order (x, theta, x_dot, theta_dot, t).
  std::vector<Plane> Planes() const;

  struct Accelerations {
    double x_acc;
    double theta_acc;
  };
  Accelerations Accelerate(double theta, double theta_dot,
                           double force) const;

 private:
  CartPoleParams params_;
  std::vector<InputFeature> features_;
};

}  // namespace clipadp
