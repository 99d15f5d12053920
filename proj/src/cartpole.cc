#include <cmath>
#include <limits>

#include "clipadp/clipping.h"
#include "clipadp/envs.h"

namespace clipadp {

CartPole::CartPole(CartPoleParams params) : params_(params) {
  if (!(params_.gravity > 0 && params_.cart_mass > 0 &&
        params_.pole_mass > 0 && params_.half_length > 0 &&
        params_.force_mag > 0 && params_.dt > 0 && params_.angle_limit > 0 &&
        params_.track_limit > 0 && params_.horizon > 0)) {
    throw ContractError("CartPole: parameters must be positive");
  }
  features_ = {{kX, 0.16},
               {kTheta, 15.0 / std::numbers::pi},
               {kXDot, 1.0},
               {kThetaDot, 4.0}};
}

CartPole::Accelerations CartPole::Accelerate(double theta, double theta_dot,
                                             double force) const {
  const double g = params_.gravity;
  const double m = params_.pole_mass;
  const double l = params_.half_length;
  const double total = params_.cart_mass + m;
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double push = (force + m * l * theta_dot * theta_dot * s) / total;
  const double theta_acc =
      (g * s - c * push) / (l * (4.0 / 3.0 - m * c * c / total));
  const double x_acc =
      (force + m * l * (theta_dot * theta_dot * s - theta_acc * c)) / total;
  return {x_acc, theta_acc};
}

State CartPole::Model(const State& x, const Action& a) const {
  CheckAction(*this, a, "CartPole");
  const double dt = params_.dt;
  const Accelerations acc = Accelerate(x[kTheta], x[kThetaDot], a[0]);
  State next(5);
  next[kX] = x[kX] + x[kXDot] * dt;
  next[kTheta] = x[kTheta] + x[kThetaDot] * dt;
  next[kXDot] = x[kXDot] + acc.x_acc * dt;
  next[kThetaDot] = x[kThetaDot] + acc.theta_acc * dt;
  next[kTime] = x[kTime] + 1.0;
  return next;
}

double CartPole::Cost(const State&, const Action& a) const {
  CheckAction(*this, a, "CartPole");
  return 0.0;
}

ModelJacobians CartPole::Jacobians(const State& x, const Action& a) const {
  CheckAction(*this, a, "CartPole");
  const double g = params_.gravity;
  const double m = params_.pole_mass;
  const double l = params_.half_length;
  const double total = params_.cart_mass + m;
  const double dt = params_.dt;
  const double theta = x[kTheta];
  const double w = x[kThetaDot];
  const double force = a[0];
  const double s = std::sin(theta);
  const double c = std::cos(theta);

  const double push = (force + m * l * w * w * s) / total;
  const double push_theta = m * l * w * w * c / total;
  const double push_w = 2.0 * m * l * w * s / total;
  const double push_f = 1.0 / total;

  const double num = g * s - c * push;
  const double num_theta = g * c + s * push - c * push_theta;
  const double num_w = -c * push_w;
  const double num_f = -c * push_f;
  const double den = l * (4.0 / 3.0 - m * c * c / total);
  const double den_theta = l * 2.0 * m * c * s / total;

  const double th_acc = num / den;
  const double th_acc_theta = (num_theta * den - num * den_theta) / (den * den);
  const double th_acc_w = num_w / den;
  const double th_acc_f = num_f / den;

  const double x_acc_theta =
      m * l * (w * w * c - th_acc_theta * c + th_acc * s) / total;
  const double x_acc_w = m * l * (2.0 * w * s - th_acc_w * c) / total;
  const double x_acc_f = (1.0 - m * l * th_acc_f * c) / total;

  ModelJacobians j;
  j.df_dx = Mat::Identity(5, 5);
  j.df_dx(kXDot, kX) = dt;
  j.df_dx(kThetaDot, kTheta) = dt;
  j.df_dx(kTheta, kXDot) = x_acc_theta * dt;
  j.df_dx(kThetaDot, kXDot) = x_acc_w * dt;
  j.df_dx(kTheta, kThetaDot) = th_acc_theta * dt;
  j.df_dx(kThetaDot, kThetaDot) += th_acc_w * dt;
  j.df_da = Mat::Zero(1, 5);
  j.df_da(0, kXDot) = x_acc_f * dt;
  j.df_da(0, kThetaDot) = th_acc_f * dt;
  j.dU_dx = Vec::Zero(5);
  j.dU_da = Vec::Zero(1);
  return j;
}

double CartPole::TerminalCost(const State&) const { return 1.0; }

Vec CartPole::TerminalCostGradient(const State&) const { return Vec::Zero(5); }

bool CartPole::IsTerminal(const State& x) const {
  return std::abs(x[kX]) >= params_.track_limit ||
         std::abs(x[kTheta]) >= params_.angle_limit ||
         x[kTime] >= params_.horizon;
}

std::vector<Plane> CartPole::Planes() const {
  auto plane = [](int index, double at, double normal) {
    Plane p{Vec::Zero(5), Vec::Zero(5)};
    p.point[index] = at;
    p.normal[index] = normal;
    return p;
  };
  return {plane(kTheta, params_.angle_limit, -1.0),
          plane(kTheta, -params_.angle_limit, 1.0),
          plane(kX, params_.track_limit, -1.0),
          plane(kX, -params_.track_limit, 1.0),
          plane(kTime, static_cast<double>(params_.horizon), 1.0)};
}

Plane CartPole::Boundary(const State& from, const State& to) const {
  const bool breached[] = {
      to[kTheta] >= params_.angle_limit, to[kTheta] <= -params_.angle_limit,
      to[kX] >= params_.track_limit, to[kX] <= -params_.track_limit,
      to[kTime] >= params_.horizon};
  const std::vector<Plane> planes = Planes();
  int best = -1;
  double best_lambda = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(planes.size()); ++i) {
    if (!breached[i]) continue;
    const double lambda = ClippingFraction(from, to, planes[i]);
    if (lambda < best_lambda) {
      best_lambda = lambda;
      best = i;
    }
  }
  if (best < 0) {
    throw ContractError("CartPole::Boundary: transition crosses no boundary");
  }
  return planes[best];
}

Action CartPole::ActionFromOutput(const Vec& y) const {
  return params_.force_mag * y;
}

Vec CartPole::ActionOutputSlope() const {
  return Vec::Constant(1, params_.force_mag);
}

State CartPole::SampleStart(std::mt19937_64& rng) const {
  const double xl = params_.track_limit;
  const double al = params_.angle_limit;
  std::uniform_real_distribution<double> pos(std::nextafter(-xl, 0.0), xl);
  std::uniform_real_distribution<double> ang(std::nextafter(-al, 0.0), al);
  State x = State::Zero(5);
  x[kX] = pos(rng);
  x[kTheta] = ang(rng);
  return x;
}

std::pair<State, Action> CartPole::SampleNearBoundary(
    std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double dt = params_.dt;
  State x = State::Zero(5);
  const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
  x[kTime] = std::floor(unit(rng) * (params_.horizon - 1));
  if (unit(rng) < 0.5) {
    // Pole about to fall past +-angle_limit.
    x[kThetaDot] = sign * (0.2 + 3.0 * unit(rng));
    x[kTheta] = sign * params_.angle_limit -
                x[kThetaDot] * dt * (0.05 + 0.9 * unit(rng));
    x[kX] = (2.0 * unit(rng) - 1.0) * 0.8 * params_.track_limit;
    x[kXDot] = 2.0 * unit(rng) - 1.0;
  } else {
    // Cart about to leave the track.
    x[kXDot] = sign * (0.2 + 3.0 * unit(rng));
    x[kX] = sign * params_.track_limit -
            x[kXDot] * dt * (0.05 + 0.9 * unit(rng));
    x[kTheta] = (2.0 * unit(rng) - 1.0) * 0.5 * params_.angle_limit;
    x[kThetaDot] = 2.0 * unit(rng) - 1.0;
  }
  Action a(1);
  a[0] = params_.force_mag * (2.0 * unit(rng) - 1.0);
  return {x, a};
}

}  // namespace clipadp
