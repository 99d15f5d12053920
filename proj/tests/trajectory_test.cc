#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "clipadp/envs.h"
#include "clipadp/trajectory.h"
#include "test_envs.h"

namespace clipadp {
namespace {

using testing::V;

Trajectory Manual(std::vector<double> costs, double phi,
                  std::optional<double> lambda) {
  Trajectory t;
  for (size_t i = 0; i < costs.size(); ++i) {
    t.states.push_back(V({0}));
    t.actions.push_back(V({0}));
  }
  t.states.push_back(V({0}));
  t.step_costs = std::move(costs);
  t.terminal_cost = phi;
  if (lambda) {
    ClipEvent ev;
    ev.lambda = *lambda;
    t.clip = ev;
  }
  return t;
}

TEST(ReturnTest, UndiscountedSum) {
  EXPECT_EQ(EvaluateReturn(Manual({1, 1}, 0, std::nullopt), 1.0), 2.0);
}

TEST(ReturnTest, SingleClippedStep) {
  // lambda U already stored as the step cost.
  EXPECT_DOUBLE_EQ(EvaluateReturn(Manual({0.5 * 0.8}, 10, 0.5), 1.0), 10.4);
}

TEST(ReturnTest, DiscountsTerminalByFractionalStep) {
  const double gamma = 0.9;
  const Trajectory t = Manual({1, 2, 0.25}, 3, 0.25);
  const double want = 1 + gamma * 2 + gamma * gamma * 0.25 +
                      gamma * gamma * std::pow(gamma, 0.25) * 3;
  EXPECT_NEAR(EvaluateReturn(t, gamma), want, 1e-15);
  EXPECT_DOUBLE_EQ(t.duration(), 2.25);
}

TEST(UnrollTest, ZeroWeightLanderStopsExactlyOnGround) {
  const Lander env;
  const MlpNet actor(3, 1, OutputActivation::kTanh);
  std::mt19937_64 rng(0);
  const Trajectory t = Unroll(env, actor, V({100, -10, 30}), {}, rng);
  ASSERT_TRUE(t.clip.has_value());
  EXPECT_GT(t.clip->lambda, 0.0);
  EXPECT_LE(t.clip->lambda, 1.0);
  EXPECT_NEAR(t.states.back()[0], 0.0, 1e-9);
  for (const Action& a : t.actions) EXPECT_EQ(a[0], 0.5);
  for (int i = 0; i + 1 < t.length(); ++i) EXPECT_GT(t.states[i + 1][0], 0.0);
  // Forward simulation by hand: v_k = -10 + 0.3 k, h_k = 100 + sum v.
  double h = 100, v = -10;
  int steps = 0;
  while (h + v > 0) {
    h += v;
    v += 0.3;
    ++steps;
  }
  EXPECT_EQ(t.length(), steps + 1);
  EXPECT_NEAR(t.clip->lambda, h / -v, 1e-12);
  EXPECT_NEAR(t.return_value,
              4 * 0.5 * (steps + t.clip->lambda) +
                  env.TerminalCost(t.states.back()),
              1e-9);
}

TEST(UnrollTest, ExactLandingMatchesUnclippedTrajectory) {
  const testing::LineEnv env;
  // Zero weights output 0; give the line env a constant step via bias.
  MlpNet actor(1, 1, OutputActivation::kLinear, 1.0);
  actor.mutable_weights()[actor.NodeOffset(3, 0)] = -0.5;
  std::mt19937_64 rng(0);
  UnrollOptions clip, noclip;
  noclip.clip_enabled = false;
  const Trajectory a = Unroll(env, actor, V({2.0}), clip, rng);
  const Trajectory b = Unroll(env, actor, V({2.0}), noclip, rng);
  ASSERT_TRUE(a.clip.has_value());
  EXPECT_EQ(a.clip->lambda, 1.0);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.step_costs, b.step_costs);
  EXPECT_EQ(a.return_value, b.return_value);
  EXPECT_EQ(a.length(), 4);
}

TEST(UnrollTest, CartPoleEquilibriumRunsToHorizon) {
  const CartPole env;
  const MlpNet actor(4, 1, OutputActivation::kTanh);
  std::mt19937_64 rng(0);
  UnrollOptions opts;
  opts.gamma = 0.97;
  opts.max_steps = env.DefaultMaxSteps();
  const Trajectory t = Unroll(env, actor, V({0, 0, 0, 0, 0}), opts, rng);
  EXPECT_EQ(t.length(), 300);
  ASSERT_TRUE(t.clip.has_value());
  EXPECT_EQ(t.clip->lambda, 1.0);
  EXPECT_EQ(t.clip->plane.normal, V({0, 0, 0, 0, 1}));
  for (double c : t.step_costs) EXPECT_EQ(c, 0.0);
  EXPECT_EQ(t.states.back(), V({0, 0, 0, 0, 300}));
  EXPECT_DOUBLE_EQ(t.duration(), 300.0);
  EXPECT_NEAR(t.return_value, std::pow(0.97, 300), 1e-15);
}

TEST(UnrollTest, CartPoleReturnIsDiscountToFractionalDuration) {
  const CartPole env;
  std::mt19937_64 rng(12);
  UnrollOptions opts;
  opts.gamma = 0.97;
  opts.max_steps = env.DefaultMaxSteps();
  int clipped_short = 0;
  for (int i = 0; i < 20; ++i) {
    const MlpNet actor =
        MlpNet::Random(4, 1, OutputActivation::kTanh, 1.0, rng);
    const Trajectory t = Unroll(env, actor, env.SampleStart(rng), opts, rng);
    ASSERT_TRUE(t.clip.has_value());
    if (t.clip->lambda < 1.0) ++clipped_short;
    EXPECT_NEAR(t.return_value, std::pow(0.97, t.duration()), 1e-14);
  }
  EXPECT_GT(clipped_short, 0);
}

TEST(UnrollTest, DeterministicForSameInputs) {
  const Lander env;
  std::mt19937_64 init(4);
  const MlpNet actor = MlpNet::Random(3, 1, OutputActivation::kTanh, 1.0,
                                      init);
  UnrollOptions opts;
  opts.noise_std = 0.1;
  std::mt19937_64 r1(77), r2(77);
  const Trajectory a = Unroll(env, actor, V({40, 2, 30}), opts, r1);
  const Trajectory b = Unroll(env, actor, V({40, 2, 30}), opts, r2);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.actions, b.actions);
  EXPECT_EQ(a.return_value, b.return_value);
  EXPECT_EQ(EvaluateReturn(a, 1.0), a.return_value);
}

TEST(UnrollTest, ReturnMatchesEvaluateReturnBitwise) {
  const CartPole env;
  std::mt19937_64 rng(5);
  UnrollOptions opts;
  opts.gamma = 0.97;
  opts.max_steps = env.DefaultMaxSteps();
  for (int i = 0; i < 10; ++i) {
    const MlpNet actor =
        MlpNet::Random(4, 1, OutputActivation::kTanh, 1.0, rng);
    const Trajectory t = Unroll(env, actor, env.SampleStart(rng), opts, rng);
    EXPECT_EQ(EvaluateReturn(t, 0.97), t.return_value);
  }
}

TEST(UnrollTest, TruncationAndPreconditions) {
  const Lander env;
  // Output bias 1 gives full thrust: the lander climbs until fuel runs out,
  // which takes more than 10 steps.
  MlpNet actor(3, 1, OutputActivation::kLinear, 1.0);
  actor.mutable_weights()[actor.NodeOffset(3, 0)] = 1.0;
  std::mt19937_64 rng(0);
  UnrollOptions opts;
  opts.max_steps = 10;
  EXPECT_THROW(Unroll(env, actor, V({50, 0, 30}), opts, rng), TruncationError);
  EXPECT_THROW(Unroll(env, actor, V({0, 0, 30}), {}, rng), ContractError);
  EXPECT_THROW(Unroll(env, actor, V({5, 0}), {}, rng), DimensionError);
  opts.max_steps = 100;
  opts.gamma = 0.0;
  EXPECT_THROW(Unroll(env, actor, V({50, 0, 30}), opts, rng), ContractError);
}

TEST(AdvanceTest, RecordsClipEvent) {
  const Lander env;
  const Transition tr = Advance(env, V({1, -2, 10}), V({0.2}), true, 7);
  ASSERT_TRUE(tr.clip.has_value());
  EXPECT_TRUE(tr.terminal);
  EXPECT_DOUBLE_EQ(tr.clip->lambda, 0.5);
  EXPECT_EQ(tr.clip->penultimate_index, 7);
  EXPECT_DOUBLE_EQ(tr.clip->unclipped_next[0], -1.0);
  EXPECT_DOUBLE_EQ(tr.clip->unclipped_cost, 0.8);
  EXPECT_DOUBLE_EQ(tr.cost, 0.4);
  EXPECT_EQ(tr.next[0], 0.0);

  const Transition plain = Advance(env, V({1, -2, 10}), V({0.2}), false, 7);
  EXPECT_FALSE(plain.clip.has_value());
  EXPECT_TRUE(plain.terminal);
  EXPECT_DOUBLE_EQ(plain.next[0], -1.0);
  EXPECT_DOUBLE_EQ(plain.cost, 0.8);
}

}  // namespace
}  // namespace clipadp
