#include <cmath>
#include <limits>

#include "clipadp/clipping.h"
#include "clipadp/envs.h"

namespace clipadp {

Lander::Lander(LanderParams params) : params_(params) {
  if (!(params_.k_g > 0 && params_.k_f > 0 && params_.k_u > 0 &&
        params_.mass > 0 && params_.dt > 0)) {
    throw ContractError("Lander: parameters must be positive");
  }
  features_ = {{kHeight, 1.0 / 100.0}, {kVelocity, 1.0 / 10.0},
               {kFuel, 1.0 / 50.0}};
}

void Lander::CheckAction(const Action& a) const {
  clipadp::CheckAction(*this, a, "Lander");
  if (std::abs(a[0]) > kActionSanity) {
    throw ContractError("Lander: action " + std::to_string(a[0]) +
                        " outside sanity range");
  }
}

State Lander::Model(const State& x, const Action& a) const {
  CheckAction(a);
  const double dt = params_.dt;
  State next(3);
  next[kHeight] = x[kHeight] + x[kVelocity] * dt;
  next[kVelocity] = x[kVelocity] + (a[0] - params_.k_g) * dt;
  next[kFuel] = params_.k_u * x[kFuel] - a[0] * dt;
  return next;
}

double Lander::Cost(const State&, const Action& a) const {
  CheckAction(a);
  return params_.k_f * a[0] * params_.dt;
}

ModelJacobians Lander::Jacobians(const State&, const Action& a) const {
  CheckAction(a);
  const double dt = params_.dt;
  ModelJacobians j;
  j.df_dx = Mat::Zero(3, 3);
  j.df_dx(kHeight, kHeight) = 1.0;
  j.df_dx(kVelocity, kHeight) = dt;
  j.df_dx(kVelocity, kVelocity) = 1.0;
  j.df_dx(kFuel, kFuel) = params_.k_u;
  j.df_da = Mat::Zero(1, 3);
  j.df_da(0, kVelocity) = dt;
  j.df_da(0, kFuel) = -dt;
  j.dU_dx = Vec::Zero(3);
  j.dU_da = Vec::Constant(1, params_.k_f * dt);
  return j;
}

double Lander::TerminalCost(const State& x) const {
  const double v = x[kVelocity];
  return 0.5 * params_.mass * v * v + params_.mass * params_.k_g * x[kHeight];
}

Vec Lander::TerminalCostGradient(const State& x) const {
  Vec g(3);
  g << params_.mass * params_.k_g, params_.mass * x[kVelocity], 0.0;
  return g;
}

bool Lander::IsTerminal(const State& x) const {
  return x[kHeight] <= 0.0 || x[kFuel] <= 0.0;
}

Plane Lander::GroundPlane() {
  return {Vec::Zero(3), Vec::Unit(3, kHeight)};
}

Plane Lander::FuelPlane() { return {Vec::Zero(3), Vec::Unit(3, kFuel)}; }

Plane Lander::Boundary(const State& from, const State& to) const {
  const bool ground = to[kHeight] <= 0.0;
  const bool fuel = to[kFuel] <= 0.0;
  if (!ground && !fuel) {
    throw ContractError("Lander::Boundary: transition crosses no boundary");
  }
  if (ground && !fuel) return GroundPlane();
  if (fuel && !ground) return FuelPlane();
  const double lam_ground = ClippingFraction(from, to, GroundPlane());
  const double lam_fuel = ClippingFraction(from, to, FuelPlane());
  return lam_fuel < lam_ground ? FuelPlane() : GroundPlane();
}

Action Lander::ActionFromOutput(const Vec& y) const {
  return (y.array() + 1.0) * 0.5;
}

Vec Lander::ActionOutputSlope() const { return Vec::Constant(1, 0.5); }

int Lander::DefaultMaxSteps() const {
  if (params_.max_steps > 0) return params_.max_steps;
  return static_cast<int>(std::ceil(1000.0 / params_.dt - 1e-9));
}

State Lander::SampleStart(std::mt19937_64& rng) const {
  // Open intervals h in (0, 100), v in (-10, 10).
  std::uniform_real_distribution<double> h(
      std::nextafter(0.0, 1.0), 100.0);
  std::uniform_real_distribution<double> v(
      std::nextafter(-10.0, 0.0), 10.0);
  State x(3);
  x[kHeight] = h(rng);
  x[kVelocity] = v(rng);
  x[kFuel] = 30.0;
  return x;
}

std::pair<State, Action> Lander::SampleNearBoundary(
    std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double dt = params_.dt;
  State x(3);
  x[kVelocity] = -10.0 + 12.0 * unit(rng);
  x[kHeight] = 1e-3 + 12.0 * dt * unit(rng);
  x[kFuel] = unit(rng) < 0.5 ? 1e-3 + 1.5 * dt * unit(rng) : 30.0;
  Action a(1);
  a[0] = unit(rng);
  return {x, a};
}

}  // namespace clipadp
