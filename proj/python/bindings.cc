#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clipadp/clipping.h"
#include "clipadp/envs.h"
#include "clipadp/experiment.h"
#include "clipadp/gradcheck.h"

namespace py = pybind11;

namespace clipadp {
namespace {

Vec ToVec(const std::vector<double>& v) {
  if (v.size() > static_cast<size_t>(kMaxDim)) {
    throw DimensionError("vector too long");
  }
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

std::vector<double> FromVec(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::unique_ptr<Environment> Env(const std::string& name, double dt) {
  if (name == "lander") {
    LanderParams p;
    p.dt = dt;
    return std::make_unique<Lander>(p);
  }
  if (name == "cartpole") return std::make_unique<CartPole>();
  throw UsageError("unknown environment '" + name + "'");
}

py::dict Run(const std::vector<std::string>& args) {
  const ExperimentResult r = RunExperiment(Resolve(ParseRunArgs(args)));
  py::dict out;
  out["env"] = EnvName(r.config.env);
  out["algo"] = AlgoName(r.config.algo);
  out["clip"] = r.config.clip;
  py::list curves;
  for (const SeedCurve& c : r.curves) {
    py::dict d;
    d["seed"] = c.seed;
    d["truncated"] = c.truncated;
    std::vector<double> j, dur;
    for (const CurveRow& row : c.rows) {
      j.push_back(row.mean_j);
      dur.push_back(row.mean_duration);
    }
    d["mean_J"] = j;
    d["mean_duration"] = dur;
    curves.append(d);
  }
  out["curves"] = curves;
  return out;
}

py::dict Report(const CheckReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["samples"] = r.samples;
  d["max_rel_err"] = r.max_rel_err;
  d["skipped"] = r.skipped;
  d["pass"] = r.pass;
  return d;
}

}  // namespace
}  // namespace clipadp

PYBIND11_MODULE(_clipadp, m) {
  using namespace clipadp;
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  m.def("run", &Run, py::arg("args"),
        "Runs an experiment from `run` command-line arguments and returns "
        "its learning curves.");
  m.def(
      "step",
      [](const std::string& env, std::vector<double> x, std::vector<double> a,
         double dt) {
        const auto e = Env(env, dt);
        const State s = ToVec(x);
        const Action u = ToVec(a);
        return py::make_tuple(FromVec(e->Model(s, u)), e->Cost(s, u));
      },
      py::arg("env"), py::arg("x"), py::arg("a"), py::arg("dt") = 1.0,
      "Model successor and step cost.");
  m.def(
      "clipping_fraction",
      [](std::vector<double> x, std::vector<double> f,
         std::vector<double> point, std::vector<double> normal) {
        return ClippingFraction(ToVec(x), ToVec(f),
                                Plane{ToVec(point), ToVec(normal)});
      },
      py::arg("x"), py::arg("f"), py::arg("point"), py::arg("normal"));
  m.def(
      "check_clipping",
      [](const std::string& env, int samples, double gamma, unsigned seed) {
        std::mt19937_64 rng(seed);
        return Report(CheckClippingDerivatives(*Env(env, 1.0), samples, 1e-6,
                                               1e-5, gamma, rng));
      },
      py::arg("env"), py::arg("samples") = 100, py::arg("gamma") = 1.0,
      py::arg("seed") = 1);
  m.def(
      "check_mlp",
      [](int n_in, int n_out, int nets, unsigned seed) {
        std::mt19937_64 rng(seed);
        return Report(CheckMlpGradients(n_in, n_out, OutputActivation::kTanh,
                                        1.0, nets, 1e-6, 1e-6, rng));
      },
      py::arg("n_in") = 3, py::arg("n_out") = 1, py::arg("nets") = 20,
      py::arg("seed") = 1);
}
