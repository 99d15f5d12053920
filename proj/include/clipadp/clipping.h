#pragma once

#include "clipadp/types.h"

namespace clipadp {

// Clipping the final transition of a trajectory at the terminal boundary.
//
// The transition x -> f(x, a) is treated as the segment r = x + lambda * v,
// v = f(x, a) - x. The clipping fraction lambda locates the intersection of
// that segment with the boundary's tangent plane; the clipped model and cost
// are f^C = x + lambda * v and U^C = lambda * U, and the terminal impulse is
// discounted by gamma^lambda instead of gamma.

// Slack allowed when lambda lands marginally outside [0, 1] from roundoff.
inline constexpr double kLambdaSlack = 1e-9;

// lambda = ((rho - x) . n) / ((f_next - x) . n). Throws DegeneratePlaneError
// for transitions parallel to the plane and ContractError when lambda falls
// outside [0, 1] by more than kLambdaSlack.
double ClippingFraction(const State& x, const State& f_next,
                        const Plane& plane);

struct ClippedStep {
  State next;
  double cost;
  double lambda;
};

// (x + lambda (f_next - x), lambda * cost). The returned state is projected
// onto the plane so it lies on the boundary to rounding.
ClippedStep ClippedTransition(const State& x, const State& f_next, double cost,
                              const Plane& plane);

struct FractionGradients {
  Vec dlam_dx;  // n
  Vec dlam_da;  // m
};

// d lambda / dx and d lambda / da from the model Jacobians at (x, a).
FractionGradients ClipFractionGradients(const State& x,
                                        const ModelJacobians& jac,
                                        const Plane& plane, const Vec& v);

struct ClippedJacobians {
  Vec dlam_dx;  // n
  Vec dlam_da;  // m
  Mat dfC_dx;   // n x n, (i, j) = d fC^j / d x^i
  Mat dfC_da;   // m x n
  Vec dUC_dx;   // n
  Vec dUC_da;   // m
  Vec v;        // f(x, a) - x
  double lambda;
};

// Derivatives of the clipped model and cost. `cost` is the unclipped U(x, a).
ClippedJacobians ComputeClippedJacobians(const State& x, const State& f_next,
                                         double cost,
                                         const ModelJacobians& jac,
                                         const Plane& plane);

struct QGradients {
  Vec q_x;
  Vec q_u;
};

// Gradients of Q(x, a) = U^C(x, a) + gamma^lambda * phi(f^C(x, a)) at the
// penultimate step. phi and dphi_dx are evaluated at the clipped terminal
// state.
QGradients ClippedQGradients(const ClippedJacobians& cj, double phi,
                             const Vec& dphi_dx, double gamma);

// gamma^lambda, exact at lambda == 1.
double FractionalDiscount(double gamma, double lambda);

}  // namespace clipadp
