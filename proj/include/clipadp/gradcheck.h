#pragma once

#include <functional>
#include <random>
#include <string>

#include "clipadp/algorithms.h"
#include "clipadp/clipping.h"
#include "clipadp/environment.h"
#include "clipadp/mlp.h"
#include "clipadp/types.h"

namespace clipadp {

// Central-difference verification of the analytic derivatives. The oracles
// evaluate only value functions (model, cost, terminal impulse, unrolled
// returns); none of them touches an analytic derivative.

struct CheckReport {
  std::string name;
  int samples = 0;
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int skipped = 0;   // perturbations excluded as non-differentiable
  std::string note;

  // Folds one analytic/numeric pair into the running maxima.
  void Record(double analytic, double numeric);
  void Finish();
  std::string Line() const;
};

// |a - n| / max(1, |a|, |n|)
double RelativeError(double analytic, double numeric);

// (fn(p + eps e_i) - fn(p - eps e_i)) / (2 eps) for every component i.
Vec CentralDiff(const std::function<double(const Vec&)>& fn, const Vec& point,
                double eps);
Eigen::VectorXd CentralDiff(
    const std::function<double(const Eigen::VectorXd&)>& fn,
    const Eigen::VectorXd& point, double eps);

// Jacobian in the transposed layout: (i, j) = d fn^j / d p^i.
Mat CentralDiffJacobian(const std::function<Vec(const Vec&)>& fn,
                        const Vec& point, double eps);

// Model and cost Jacobians of env at sampled (x, a) pairs.
CheckReport CheckModelJacobians(const Environment& env, int n_samples,
                                double eps, double tol, std::mt19937_64& rng);

// Fraction gradients, clipped model/cost Jacobians and clipped Q-gradients
// against central differences of the clipped value functions at sampled
// boundary-crossing transitions. `corrupt`, if set, is applied to the
// analytic Jacobians before comparison (for fault-injection tests).
CheckReport CheckClippingDerivatives(
    const Environment& env, int n_samples, double eps, double tol,
    double gamma, std::mt19937_64& rng,
    const std::function<void(ClippedJacobians&)>& corrupt = {});

// BPTT dJ/dz against per-weight central differences of the unrolled return,
// for n_inits random actors and every start state in cfg.batch. Perturbations
// that change the trajectory's length or terminal plane are skipped.
CheckReport CheckBptt(const Environment& env, const AlgoConfig& cfg,
                      int n_inits, double eps, double tol,
                      std::mt19937_64& rng);

// MLP weight and input gradients of a random projection c . y(input) for
// n_nets random networks of the given shape.
CheckReport CheckMlpGradients(int n_in, int n_out, OutputActivation out,
                              double slope, int n_nets, double eps, double tol,
                              std::mt19937_64& rng);

}  // namespace clipadp
