#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "clipadp/environment.h"
#include "clipadp/mlp.h"
#include "clipadp/types.h"

namespace clipadp {

// Record of the clipped final transition.
struct ClipEvent {
  double lambda = 1.0;        // in (0, 1]
  Plane plane;
  int penultimate_index = 0;  // T - 1
  State unclipped_next;       // f(x_{T-1}, a_{T-1})
  double unclipped_cost = 0;  // U(x_{T-1}, a_{T-1})
};

struct Trajectory {
  std::vector<State> states;        // T + 1
  std::vector<Action> actions;      // T
  std::vector<double> step_costs;   // T; last entry is lambda * U if clipped
  double terminal_cost = 0.0;       // phi(x_T)
  std::optional<ClipEvent> clip;
  double gamma = 1.0;
  double return_value = 0.0;

  int length() const { return static_cast<int>(actions.size()); }
  // T - 1 + lambda; equals T without clipping.
  double duration() const;
};

// One step of the environment, clipped when it enters the terminal set.
struct Transition {
  State next;
  double cost = 0.0;
  bool terminal = false;
  std::optional<ClipEvent> clip;
};

// Advances from non-terminal x with action a. With clip_enabled and a
// terminal successor, the step is cut at the first boundary plane crossed.
Transition Advance(const Environment& env, const State& x, const Action& a,
                   bool clip_enabled, int t);

struct UnrollOptions {
  double gamma = 1.0;
  bool clip_enabled = true;
  int max_steps = 1000;
  double noise_std = 0.0;
};

// Rolls out the actor from x0 until the first terminal state. Gaussian noise
// of std noise_std is added to each rescaled action. Throws TruncationError
// after max_steps non-terminal steps.
Trajectory Unroll(const Environment& env, const MlpNet& actor, const State& x0,
                  const UnrollOptions& options, std::mt19937_64& rng);

// Discounted return, accumulated forward in time:
//   sum_t gamma^t c_t + gamma^(T-1) gamma^lambda phi
// with lambda = 1 when the trajectory is not clipped.
double EvaluateReturn(const Trajectory& traj, double gamma);

// Running accumulator shared by Unroll, EvaluateReturn and the online
// learners, so that all report bitwise-identical returns.
class ReturnAccumulator {
 public:
  explicit ReturnAccumulator(double gamma) : gamma_(gamma) {}
  void AddStep(double cost) {
    last_discount_ = discount_;
    total_ += discount_ * cost;
    discount_ *= gamma_;
  }
  // Call once, after the final AddStep.
  void AddTerminal(double phi, double lambda);
  double value() const { return total_; }

 private:
  double gamma_;
  double discount_ = 1.0;
  double last_discount_ = 1.0;
  double total_ = 0.0;
};

}  // namespace clipadp
