#include "clipadp/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "clipadp/trajectory.h"

namespace clipadp {

namespace {

constexpr int kMaxSampleTries = 100000;

// Value-only clipped quantities for a fixed plane.
struct ClippedValues {
  double lambda;
  Vec next;
  double cost;
  double q;
};

ClippedValues EvalClipped(const Environment& env, const State& x,
                          const Action& a, const Plane& plane, double gamma) {
  const State f = env.Model(x, a);
  const double lambda =
      (plane.point - x).dot(plane.normal) / (f - x).dot(plane.normal);
  ClippedValues out;
  out.lambda = lambda;
  out.next = x + lambda * (f - x);
  out.cost = lambda * env.Cost(x, a);
  out.q = out.cost + std::pow(gamma, lambda) * env.TerminalCost(out.next);
  return out;
}

void RecordVec(CheckReport& report, const Vec& analytic, const Vec& numeric) {
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    report.Record(analytic[i], numeric[i]);
  }
}

void RecordMat(CheckReport& report, const Mat& analytic, const Mat& numeric) {
  for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
    for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
      report.Record(analytic(i, j), numeric(i, j));
    }
  }
}

// Identifies the discrete branch a trajectory took.
struct Signature {
  int length;
  bool clipped;
  Vec normal;
  Vec point;

  bool operator==(const Signature& o) const {
    return length == o.length && clipped == o.clipped &&
           (!clipped || (normal == o.normal && point == o.point));
  }
};

Signature SignatureOf(const Trajectory& traj) {
  Signature s{traj.length(), traj.clip.has_value(), Vec(), Vec()};
  if (traj.clip) {
    s.normal = traj.clip->plane.normal;
    s.point = traj.clip->plane.point;
  }
  return s;
}

}  // namespace

void CheckReport::Record(double analytic, double numeric) {
  ++samples;
  const double abs_err = std::abs(analytic - numeric);
  max_abs_err = std::max(max_abs_err, abs_err);
  const double rel = RelativeError(analytic, numeric);
  if (!(rel <= max_rel_err)) max_rel_err = rel;  // also propagates NaN
}

void CheckReport::Finish() { pass = max_rel_err <= tolerance; }

std::string CheckReport::Line() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-28s samples=%-7d max_rel_err=%.3e max_abs_err=%.3e "
                "tol=%.1e skipped=%d %s",
                name.c_str(), samples, max_rel_err, max_abs_err, tolerance,
                skipped, pass ? "PASS" : "FAIL");
  std::string line = buf;
  if (!note.empty()) line += "  (" + note + ")";
  return line;
}

double RelativeError(double analytic, double numeric) {
  const double denom =
      std::max({1.0, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / denom;
}

Vec CentralDiff(const std::function<double(const Vec&)>& fn, const Vec& point,
                double eps) {
  if (!(eps > 0.0)) throw ContractError("CentralDiff: eps must be positive");
  Vec grad(point.size());
  Vec p = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    p[i] = point[i] + eps;
    const double up = fn(p);
    p[i] = point[i] - eps;
    const double down = fn(p);
    p[i] = point[i];
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

Eigen::VectorXd CentralDiff(
    const std::function<double(const Eigen::VectorXd&)>& fn,
    const Eigen::VectorXd& point, double eps) {
  if (!(eps > 0.0)) throw ContractError("CentralDiff: eps must be positive");
  Eigen::VectorXd grad(point.size());
  Eigen::VectorXd p = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    p[i] = point[i] + eps;
    const double up = fn(p);
    p[i] = point[i] - eps;
    const double down = fn(p);
    p[i] = point[i];
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

Mat CentralDiffJacobian(const std::function<Vec(const Vec&)>& fn,
                        const Vec& point, double eps) {
  if (!(eps > 0.0)) throw ContractError("CentralDiff: eps must be positive");
  Vec p = point;
  Mat jac;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    p[i] = point[i] + eps;
    const Vec up = fn(p);
    p[i] = point[i] - eps;
    const Vec down = fn(p);
    p[i] = point[i];
    if (i == 0) jac.resize(point.size(), up.size());
    jac.row(i) = ((up - down) / (2.0 * eps)).transpose();
  }
  return jac;
}

CheckReport CheckModelJacobians(const Environment& env, int n_samples,
                                double eps, double tol,
                                std::mt19937_64& rng) {
  CheckReport report;
  report.name = "model_jacobians:" + env.name();
  report.tolerance = tol;
  for (int s = 0; s < n_samples; ++s) {
    auto sample = env.SampleNearBoundary(rng);
    const State x = s % 2 == 0 ? env.SampleStart(rng) : sample.first;
    const Action a = sample.second;
    const ModelJacobians jac = env.Jacobians(x, a);
    RecordMat(report, jac.df_dx, CentralDiffJacobian(
        [&](const Vec& xp) { return env.Model(xp, a); }, x, eps));
    RecordMat(report, jac.df_da, CentralDiffJacobian(
        [&](const Vec& ap) { return env.Model(x, ap); }, a, eps));
    RecordVec(report, jac.dU_dx,
              CentralDiff([&](const Vec& xp) { return env.Cost(xp, a); }, x,
                          eps));
    RecordVec(report, jac.dU_da,
              CentralDiff([&](const Vec& ap) { return env.Cost(x, ap); }, a,
                          eps));
    RecordVec(report, env.TerminalCostGradient(x),
              CentralDiff([&](const Vec& xp) { return env.TerminalCost(xp); },
                          x, eps));
  }
  report.Finish();
  return report;
}

CheckReport CheckClippingDerivatives(
    const Environment& env, int n_samples, double eps, double tol,
    double gamma, std::mt19937_64& rng,
    const std::function<void(ClippedJacobians&)>& corrupt) {
  CheckReport report;
  report.name = "clipping:" + env.name();
  report.tolerance = tol;
  int found = 0;
  for (int tries = 0; found < n_samples; ++tries) {
    if (tries >= kMaxSampleTries) {
      throw Error("CheckClippingDerivatives: found only " +
                  std::to_string(found) + " crossing transitions for " +
                  env.name());
    }
    const auto sample = env.SampleNearBoundary(rng);
    const State& x = sample.first;
    const Action& a = sample.second;
    if (env.IsTerminal(x)) continue;
    const State f = env.Model(x, a);
    if (!env.IsTerminal(f)) continue;
    const Plane plane = env.Boundary(x, f);
    // Keep strictly crossing, well-conditioned transitions only.
    const double vn = (f - x).dot(plane.normal);
    const double lambda = (plane.point - x).dot(plane.normal) / vn;
    if (!(lambda > 0.02 && lambda < 0.98)) continue;
    if (std::abs(vn) < 1e-2 * plane.normal.norm()) continue;
    ++found;

    ClippedJacobians cj =
        ComputeClippedJacobians(x, f, env.Cost(x, a), env.Jacobians(x, a),
                                plane);
    if (corrupt) corrupt(cj);
    const State fc = x + cj.lambda * cj.v;
    const QGradients q = ClippedQGradients(
        cj, env.TerminalCost(fc), env.TerminalCostGradient(fc), gamma);

    auto at_x = [&](const Vec& xp) {
      return EvalClipped(env, xp, a, plane, gamma);
    };
    auto at_a = [&](const Vec& ap) {
      return EvalClipped(env, x, ap, plane, gamma);
    };
    RecordVec(report, cj.dlam_dx, CentralDiff(
        [&](const Vec& xp) { return at_x(xp).lambda; }, x, eps));
    RecordVec(report, cj.dlam_da, CentralDiff(
        [&](const Vec& ap) { return at_a(ap).lambda; }, a, eps));
    RecordMat(report, cj.dfC_dx, CentralDiffJacobian(
        [&](const Vec& xp) { return at_x(xp).next; }, x, eps));
    RecordMat(report, cj.dfC_da, CentralDiffJacobian(
        [&](const Vec& ap) { return at_a(ap).next; }, a, eps));
    RecordVec(report, cj.dUC_dx, CentralDiff(
        [&](const Vec& xp) { return at_x(xp).cost; }, x, eps));
    RecordVec(report, cj.dUC_da, CentralDiff(
        [&](const Vec& ap) { return at_a(ap).cost; }, a, eps));
    RecordVec(report, q.q_x, CentralDiff(
        [&](const Vec& xp) { return at_x(xp).q; }, x, eps));
    RecordVec(report, q.q_u, CentralDiff(
        [&](const Vec& ap) { return at_a(ap).q; }, a, eps));
  }
  report.note = std::to_string(found) + " crossings, gamma=" +
                std::to_string(gamma);
  report.Finish();
  return report;
}

CheckReport CheckBptt(const Environment& env, const AlgoConfig& cfg,
                      int n_inits, double eps, double tol,
                      std::mt19937_64& rng) {
  if (cfg.noise_std != 0.0) {
    throw ContractError("CheckBptt: configuration must be noise-free");
  }
  CheckReport report;
  report.name = std::string("bptt:") + env.name() +
                (cfg.clip_enabled ? ":clip" : ":noclip");
  report.tolerance = tol;
  const UnrollOptions opts{cfg.gamma, cfg.clip_enabled, cfg.max_steps, 0.0};
  const int n_in = static_cast<int>(env.InputFeatures().size());
  bool all_zero = true;
  for (int init = 0; init < n_inits; ++init) {
    MlpNet actor = MlpNet::Random(n_in, env.action_dim(),
                                  OutputActivation::kTanh, 1.0, rng);
    const Weights z = actor.weights();
    for (const State& x0 : cfg.batch) {
      const Trajectory base = Unroll(env, actor, x0, opts, rng);
      const Signature sig = SignatureOf(base);
      const Weights analytic = BpttGradient(base, env, actor, cfg);
      all_zero = all_zero && (analytic.array() == 0.0).all();

      MlpNet probe = actor;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        Weights zp = z;
        zp[i] = z[i] + eps;
        probe.set_weights(zp);
        const Trajectory up = Unroll(env, probe, x0, opts, rng);
        zp[i] = z[i] - eps;
        probe.set_weights(zp);
        const Trajectory down = Unroll(env, probe, x0, opts, rng);
        if (!(SignatureOf(up) == sig) || !(SignatureOf(down) == sig)) {
          ++report.skipped;
          continue;
        }
        const double numeric =
            (up.return_value - down.return_value) / (2.0 * eps);
        report.Record(analytic[i], numeric);
      }
    }
  }
  if (all_zero) {
    report.note = "analytic gradient identically zero";
  }
  report.Finish();
  return report;
}

CheckReport CheckMlpGradients(int n_in, int n_out, OutputActivation out,
                              double slope, int n_nets, double eps, double tol,
                              std::mt19937_64& rng) {
  CheckReport report;
  report.name = "mlp:" + std::to_string(n_in) + "x" + std::to_string(n_out) +
                (out == OutputActivation::kTanh ? ":tanh" : ":linear");
  report.tolerance = tol;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < n_nets; ++k) {
    MlpNet net = MlpNet::Random(n_in, n_out, out, slope, rng);
    // Larger weights than the initial draw exercise the tanh curvature.
    for (Eigen::Index i = 0; i < net.weights().size(); ++i) {
      net.mutable_weights()[i] = unit(rng);
    }
    Vec input(n_in);
    for (int i = 0; i < n_in; ++i) input[i] = unit(rng);
    Vec c(n_out);
    for (int i = 0; i < n_out; ++i) c[i] = unit(rng);

    const Weights gw = net.GradWeights(input, c);
    const Vec gi = net.GradInput(input, c);
    MlpNet probe = net;
    const Eigen::VectorXd nw = CentralDiff(
        [&](const Eigen::VectorXd& w) {
          probe.set_weights(w);
          return c.dot(probe.Forward(input));
        },
        net.weights(), eps);
    for (Eigen::Index i = 0; i < gw.size(); ++i) report.Record(gw[i], nw[i]);
    RecordVec(report, gi, CentralDiff(
        [&](const Vec& in) { return c.dot(net.Forward(in)); }, input, eps));
  }
  report.note = std::to_string(n_nets) + " nets";
  report.Finish();
  return report;
}

}  // namespace clipadp
