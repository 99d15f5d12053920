#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include <gtest/gtest.h>

#include "clipadp/gradcheck.h"
#include "clipadp/mlp.h"
#include "test_envs.h"

namespace clipadp {
namespace {

using testing::V;

// Matrix-form forward pass. Builds one weight matrix per (source,
// destination) layer pair straight from the documented canonical layout.
Eigen::VectorXd ReferenceForward(const MlpNet& net,
                                 const Eigen::VectorXd& input) {
  const auto& sizes = net.sizes();
  const Eigen::VectorXd& w = net.weights();
  std::vector<Eigen::VectorXd> act = {input};
  int pos = 0;
  for (int d = 1; d < MlpNet::kLayers; ++d) {
    int fan = 1;
    for (int s = 0; s < d; ++s) fan += sizes[s];
    Eigen::MatrixXd block(sizes[d], fan);
    for (int k = 0; k < sizes[d]; ++k) {
      for (int c = 0; c < fan; ++c) block(k, c) = w[pos++];
    }
    Eigen::VectorXd concat(fan);
    concat[0] = 1.0;
    int c = 1;
    for (int s = 0; s < d; ++s) {
      concat.segment(c, sizes[s]) = act[s];
      c += sizes[s];
    }
    Eigen::VectorXd pre = block * concat;
    if (d < MlpNet::kLayers - 1 ||
        net.output_activation() == OutputActivation::kTanh) {
      act.push_back(pre.array().tanh().matrix());
    } else {
      act.push_back(net.slope() * pre);
    }
  }
  EXPECT_EQ(pos, w.size());
  return act.back();
}

TEST(MlpTest, WeightCountCoversAllLayerPairs) {
  // Connections: in->h1, in->h2, in->out, h1->h2, h1->out, h2->out.
  const int connections = 3 * 6 + 3 * 6 + 3 * 1 + 6 * 6 + 6 * 1 + 6 * 1;
  const int biases = 6 + 6 + 1;
  EXPECT_EQ(connections + biases, 100);
  EXPECT_EQ(MlpNet::WeightCount(3, 1), 100);
  MlpNet net(3, 1, OutputActivation::kTanh);
  EXPECT_EQ(net.weights().size(), 100);
  // Cart-pole actor and DHP critic.
  EXPECT_EQ(MlpNet::WeightCount(4, 1), 4 * 13 + 36 + 12 + 13);
  EXPECT_EQ(MlpNet::WeightCount(4, 4), 4 * 6 * 2 + 36 + 4 * 4 + 6 * 4 * 2 +
                                           6 + 6 + 4);
}

TEST(MlpTest, RandomInitIsUniformInRangeAndDeterministic) {
  std::mt19937_64 rng1(7), rng2(7);
  const MlpNet a = MlpNet::Random(3, 1, OutputActivation::kTanh, 1.0, rng1);
  const MlpNet b = MlpNet::Random(3, 1, OutputActivation::kTanh, 1.0, rng2);
  EXPECT_EQ(a.weights(), b.weights());
  EXPECT_LE(a.weights().maxCoeff(), 0.1);
  EXPECT_GE(a.weights().minCoeff(), -0.1);
  EXPECT_GT(a.weights().maxCoeff(), 0.05);
  EXPECT_LT(a.weights().minCoeff(), -0.05);
}

TEST(MlpTest, ZeroWeightsGiveZeroOutputAndZeroInputGradient) {
  const MlpNet net(3, 2, OutputActivation::kLinear, 20.0);
  const Vec x = V({0.3, -1.2, 4.0});
  EXPECT_EQ(net.Forward(x), Vec::Zero(2));
  EXPECT_EQ(net.GradInput(x, V({1.0, -2.0})), Vec::Zero(3));
}

TEST(MlpTest, ZeroCotangentGivesZeroGradient) {
  std::mt19937_64 rng(3);
  const MlpNet net = MlpNet::Random(3, 2, OutputActivation::kTanh, 1.0, rng);
  const Vec x = V({0.1, 0.2, 0.3});
  EXPECT_TRUE((net.GradWeights(x, Vec::Zero(2)).array() == 0.0).all());
  EXPECT_EQ(net.GradInput(x, Vec::Zero(2)), Vec::Zero(3));
}

TEST(MlpTest, LinearOutputScalesWithSlope) {
  std::mt19937_64 rng(11);
  MlpNet net = MlpNet::Random(4, 4, OutputActivation::kLinear, 1.0, rng);
  const Vec x = V({0.5, -0.5, 0.25, 1.0});
  const Vec y1 = net.Forward(x);
  net.set_slope(20.0);
  const Vec y20 = net.Forward(x);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(y20[i], 20.0 * y1[i], 1e-15);
}

TEST(MlpTest, ForwardMatchesMatrixForm) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto out : {OutputActivation::kTanh, OutputActivation::kLinear}) {
    MlpNet net = MlpNet::Random(4, 3, out, 0.7, rng);
    for (Eigen::Index i = 0; i < net.weights().size(); ++i) {
      net.mutable_weights()[i] = u(rng);
    }
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd x(4);
      for (int i = 0; i < 4; ++i) x[i] = u(rng);
      const Eigen::VectorXd ref = ReferenceForward(net, x);
      const Vec y = net.Forward(Vec(x));
      for (int i = 0; i < 3; ++i) EXPECT_NEAR(y[i], ref[i], 1e-14);
    }
  }
}

TEST(MlpTest, NodeOffsetsFollowCanonicalLayout) {
  const MlpNet net(3, 1, OutputActivation::kTanh);
  EXPECT_EQ(net.NodeOffset(1, 0), 0);
  EXPECT_EQ(net.NodeOffset(1, 1), 4);
  EXPECT_EQ(net.NodeOffset(2, 0), 24);
  EXPECT_EQ(net.NodeOffset(2, 1), 24 + 10);
  EXPECT_EQ(net.NodeOffset(3, 0), 84);
  // Output bias alone shifts the output by tanh(bias).
  MlpNet biased = net;
  biased.mutable_weights()[84] = 0.5;
  EXPECT_DOUBLE_EQ(biased.Forward(V({1, 2, 3}))[0], std::tanh(0.5));
}

TEST(MlpTest, GradientsMatchCentralDifferences) {
  std::mt19937_64 rng(21);
  for (auto out : {OutputActivation::kTanh, OutputActivation::kLinear}) {
    const CheckReport r = CheckMlpGradients(3, 2, out, 10.0, 20, 1e-6, 1e-6,
                                            rng);
    EXPECT_TRUE(r.pass) << r.Line();
    EXPECT_GT(r.samples, 20 * 100);
  }
}

TEST(MlpTest, BackwardAccumulatesScaledGradient) {
  std::mt19937_64 rng(8);
  const MlpNet net = MlpNet::Random(3, 1, OutputActivation::kTanh, 1.0, rng);
  const Vec x = V({0.2, 0.4, -0.6});
  const Weights g = net.GradWeights(x, V({1.0}));
  Weights acc = Weights::Ones(g.size());
  MlpNet::Tape tape;
  net.Forward(x, tape);
  net.Backward(tape, V({1.0}), 2.5, &acc, nullptr);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    EXPECT_DOUBLE_EQ(acc[i], 1.0 + 2.5 * g[i]);
  }
}

TEST(MlpTest, RejectsWrongDimensions) {
  const MlpNet net(3, 1, OutputActivation::kTanh);
  EXPECT_THROW(net.Forward(V({1.0, 2.0})), DimensionError);
  EXPECT_THROW(net.GradInput(V({1, 2, 3}), V({1, 2})), DimensionError);
  MlpNet copy = net;
  EXPECT_THROW(copy.set_weights(Weights::Zero(99)), DimensionError);
  EXPECT_THROW(MlpNet(0, 1, OutputActivation::kTanh), DimensionError);
}

class MlpSnapshotTest : public ::testing::Test {
 protected:
  void SetUp() override {
    path_ = (std::filesystem::temp_directory_path() /
             ("clipadp_mlp_" + std::to_string(::getpid()) + ".txt"))
                .string();
  }
  void TearDown() override { std::filesystem::remove(path_); }
  std::string path_;
};

TEST_F(MlpSnapshotTest, RoundTripIsExact) {
  std::mt19937_64 rng(99);
  MlpNet net = MlpNet::Random(4, 4, OutputActivation::kLinear, 0.1, rng);
  net.mutable_weights()[3] = 1.0 / 3.0;
  net.Save(path_);
  const MlpNet loaded = MlpNet::Load(path_);
  EXPECT_EQ(loaded.n_in(), 4);
  EXPECT_EQ(loaded.n_out(), 4);
  EXPECT_EQ(loaded.output_activation(), OutputActivation::kLinear);
  EXPECT_EQ(loaded.slope(), 0.1);
  EXPECT_EQ(loaded.weights(), net.weights());
}

TEST_F(MlpSnapshotTest, RejectsCorruptFiles) {
  {
    std::ofstream out(path_);
    out << "not-a-snapshot 1 3 1 tanh 1 100\n";
  }
  EXPECT_THROW(MlpNet::Load(path_), Error);
  {
    std::ofstream out(path_);
    out << "clipadp-mlp 2 3 1 tanh 1 100\n";
  }
  EXPECT_THROW(MlpNet::Load(path_), Error);
  {
    std::ofstream out(path_);
    out << "clipadp-mlp 1 3 1 tanh 1 100\n0.5\n";
  }
  EXPECT_THROW(MlpNet::Load(path_), Error);
  {
    std::ofstream out(path_);
    out << "clipadp-mlp 1 3 1 tanh 1 50\n";
  }
  EXPECT_THROW(MlpNet::Load(path_), Error);
  EXPECT_THROW(MlpNet::Load(path_ + ".missing"), Error);
}

}  // namespace
}  // namespace clipadp
