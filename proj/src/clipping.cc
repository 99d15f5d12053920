#include "clipadp/clipping.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace clipadp {

namespace {

constexpr double kDegenerateTol = 1e-12;

void CheckPlane(const Plane& plane, int n) {
  if (plane.point.size() != n || plane.normal.size() != n) {
    throw DimensionError("plane dimension does not match state dimension");
  }
  if (plane.normal.squaredNorm() == 0.0) {
    throw ContractError("plane normal has zero length");
  }
}

// v . n, rejecting transitions parallel to the plane.
double Approach(const Vec& v, const Plane& plane) {
  const double vn = v.dot(plane.normal);
  const double scale =
      kDegenerateTol * plane.normal.norm() * std::max(1.0, v.norm());
  if (!(std::abs(vn) >= scale)) {
    throw DegeneratePlaneError(
        "transition is parallel to the terminal plane (v.n = " +
        std::to_string(vn) + ")");
  }
  return vn;
}

}  // namespace

double ClippingFraction(const State& x, const State& f_next,
                        const Plane& plane) {
  CheckPlane(plane, x.size());
  const Vec v = f_next - x;
  const double vn = Approach(v, plane);
  double lambda = (plane.point - x).dot(plane.normal) / vn;
  if (lambda < -kLambdaSlack || lambda > 1.0 + kLambdaSlack ||
      !std::isfinite(lambda)) {
    throw ContractError("clipping fraction " + std::to_string(lambda) +
                        " outside [0, 1]: segment does not cross the plane");
  }
  return std::clamp(lambda, 0.0, 1.0);
}

ClippedStep ClippedTransition(const State& x, const State& f_next, double cost,
                              const Plane& plane) {
  const double lambda = ClippingFraction(x, f_next, plane);
  if (lambda == 1.0) return {f_next, cost, 1.0};
  State next = x + lambda * (f_next - x);
  const double off = (plane.point - next).dot(plane.normal);
  next += (off / plane.normal.squaredNorm()) * plane.normal;
  return {next, lambda * cost, lambda};
}

FractionGradients ClipFractionGradients(const State& x,
                                        const ModelJacobians& jac,
                                        const Plane& plane, const Vec& v) {
  CheckPlane(plane, x.size());
  const double vn = Approach(v, plane);
  const double gap = (plane.point - x).dot(plane.normal);
  const double k = gap / (vn * vn);
  const Vec& n = plane.normal;
  FractionGradients g;
  // (df_dx - I) n
  const Vec dvn_dx = jac.df_dx * n - n;
  g.dlam_dx = -n / vn - k * dvn_dx;
  g.dlam_da = -k * (jac.df_da * n);
  return g;
}

ClippedJacobians ComputeClippedJacobians(const State& x, const State& f_next,
                                         double cost,
                                         const ModelJacobians& jac,
                                         const Plane& plane) {
  ClippedJacobians cj;
  cj.v = f_next - x;
  cj.lambda = ClippingFraction(x, f_next, plane);
  FractionGradients fg = ClipFractionGradients(x, jac, plane, cj.v);
  cj.dlam_dx = std::move(fg.dlam_dx);
  cj.dlam_da = std::move(fg.dlam_da);
  const double lambda = cj.lambda;
  // I + dlam_dx v^T + lambda (df_dx - I), arranged so lambda == 1 with zero
  // fraction gradients reproduces df_dx bit for bit.
  cj.dfC_dx = lambda * jac.df_dx;
  cj.dfC_dx.diagonal().array() += (1.0 - lambda);
  cj.dfC_dx.noalias() += cj.dlam_dx * cj.v.transpose();
  cj.dfC_da = lambda * jac.df_da;
  cj.dfC_da.noalias() += cj.dlam_da * cj.v.transpose();
  cj.dUC_dx = lambda * jac.dU_dx + cost * cj.dlam_dx;
  cj.dUC_da = lambda * jac.dU_da + cost * cj.dlam_da;
  return cj;
}

double FractionalDiscount(double gamma, double lambda) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ContractError("discount factor must lie in (0, 1]");
  }
  if (gamma == 1.0) return 1.0;
  if (lambda == 1.0) return gamma;
  return std::exp(lambda * std::log(gamma));
}

QGradients ClippedQGradients(const ClippedJacobians& cj, double phi,
                             const Vec& dphi_dx, double gamma) {
  const double discount = FractionalDiscount(gamma, cj.lambda);
  const double log_gamma = gamma == 1.0 ? 0.0 : std::log(gamma);
  QGradients q;
  Vec inner_x = cj.dfC_dx * dphi_dx;
  Vec inner_u = cj.dfC_da * dphi_dx;
  if (log_gamma != 0.0) {
    inner_x += (log_gamma * phi) * cj.dlam_dx;
    inner_u += (log_gamma * phi) * cj.dlam_da;
  }
  q.q_x = cj.dUC_dx + discount * inner_x;
  q.q_u = cj.dUC_da + discount * inner_u;
  if (!q.q_x.allFinite() || !q.q_u.allFinite()) {
    throw Error("clipped Q-gradients are not finite");
  }
  return q;
}

}  // namespace clipadp
