#include "clipadp/mlp.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace clipadp {

namespace {

constexpr const char* kSnapshotMagic = "clipadp-mlp";
constexpr int kSnapshotVersion = 1;

int FanIn(const std::array<int, MlpNet::kLayers>& sizes, int layer) {
  int fan = 1;
  for (int src = 0; src < layer; ++src) fan += sizes[src];
  return fan;
}

}  // namespace

MlpNet::MlpNet(int n_in, int n_out, OutputActivation out, double slope)
    : out_(out), slope_(slope) {
  if (n_in < 1 || n_out < 1 || n_in > kMaxDim || n_out > kMaxDim) {
    throw DimensionError("MlpNet: layer sizes must lie in [1, " +
                         std::to_string(kMaxDim) + "]");
  }
  sizes_ = {n_in, kHidden, kHidden, n_out};
  int offset = 0;
  for (int d = 1; d < kLayers; ++d) {
    layer_offset_[d] = offset;
    offset += sizes_[d] * FanIn(sizes_, d);
  }
  weights_ = Weights::Zero(offset);
}

MlpNet MlpNet::Random(int n_in, int n_out, OutputActivation out, double slope,
                      std::mt19937_64& rng) {
  MlpNet net(n_in, n_out, out, slope);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  for (Eigen::Index i = 0; i < net.weights_.size(); ++i) {
    net.weights_[i] = dist(rng);
  }
  return net;
}

int MlpNet::WeightCount(int n_in, int n_out) {
  return MlpNet(n_in, n_out, OutputActivation::kLinear).weights().size();
}

void MlpNet::set_weights(const Weights& w) {
  if (w.size() != weights_.size()) {
    throw DimensionError("MlpNet::set_weights: expected " +
                         std::to_string(weights_.size()) + " weights, got " +
                         std::to_string(w.size()));
  }
  weights_ = w;
}

int MlpNet::NodeOffset(int layer, int node) const {
  return layer_offset_[layer] + node * FanIn(sizes_, layer);
}

void MlpNet::CheckInput(const Vec& input) const {
  if (input.size() != sizes_[0]) {
    throw DimensionError("MlpNet: input has dimension " +
                         std::to_string(input.size()) + ", expected " +
                         std::to_string(sizes_[0]));
  }
}

Vec MlpNet::Forward(const Vec& input) const {
  Tape tape;
  return Forward(input, tape);
}

Vec MlpNet::Forward(const Vec& input, Tape& tape) const {
  CheckInput(input);
  for (int j = 0; j < sizes_[0]; ++j) tape.act[0][j] = input[j];
  const double* w = weights_.data();
  for (int d = 1; d < kLayers; ++d) {
    const bool is_output = d == kLayers - 1;
    // Node blocks of a layer are contiguous.
    const double* node = w + layer_offset_[d];
    for (int k = 0; k < sizes_[d]; ++k) {
      double pre = *node++;
      for (int src = 0; src < d; ++src) {
        const auto& a = tape.act[src];
        for (int j = 0; j < sizes_[src]; ++j) pre += *node++ * a[j];
      }
      if (!is_output || out_ == OutputActivation::kTanh) {
        tape.act[d][k] = std::tanh(pre);
      } else {
        tape.act[d][k] = slope_ * pre;
      }
    }
  }
  Vec out(sizes_[3]);
  for (int k = 0; k < sizes_[3]; ++k) out[k] = tape.act[3][k];
  return out;
}

void MlpNet::Backward(const Tape& tape, const Vec& cotangent, double scale,
                      Weights* weight_grad, Vec* input_grad) const {
  if (cotangent.size() != sizes_[3]) {
    throw DimensionError("MlpNet: cotangent has dimension " +
                         std::to_string(cotangent.size()) + ", expected " +
                         std::to_string(sizes_[3]));
  }
  if (weight_grad != nullptr && weight_grad->size() != weights_.size()) {
    throw DimensionError("MlpNet: weight gradient buffer has wrong size");
  }
  // grad[l][j]: d(c . out)/d act[l][j], accumulated from all later layers.
  std::array<std::array<double, kMaxDim>, kLayers> grad{};
  for (int k = 0; k < sizes_[3]; ++k) grad[3][k] = cotangent[k];

  const double* w = weights_.data();
  double* g = weight_grad != nullptr ? weight_grad->data() : nullptr;
  for (int d = kLayers - 1; d >= 1; --d) {
    const bool is_output = d == kLayers - 1;
    const int fan = FanIn(sizes_, d);
    for (int k = 0; k < sizes_[d]; ++k) {
      const double y = tape.act[d][k];
      double delta;
      if (!is_output || out_ == OutputActivation::kTanh) {
        delta = grad[d][k] * (1.0 - y * y);
      } else {
        delta = grad[d][k] * slope_;
      }
      if (delta == 0.0) continue;
      const int offset = layer_offset_[d] + k * fan;
      const double* node_w = w + offset + 1;
      double* node_g = g != nullptr ? g + offset : nullptr;
      if (node_g != nullptr) *node_g++ += scale * delta;
      for (int src = 0; src < d; ++src) {
        const auto& a = tape.act[src];
        auto& ga = grad[src];
        for (int j = 0; j < sizes_[src]; ++j) {
          if (node_g != nullptr) *node_g++ += scale * delta * a[j];
          ga[j] += *node_w++ * delta;
        }
      }
    }
  }
  if (input_grad != nullptr) {
    input_grad->resize(sizes_[0]);
    for (int j = 0; j < sizes_[0]; ++j) (*input_grad)[j] = grad[0][j];
  }
}

Weights MlpNet::GradWeights(const Vec& input, const Vec& cotangent) const {
  Tape tape;
  Forward(input, tape);
  Weights grad = Weights::Zero(weights_.size());
  Backward(tape, cotangent, 1.0, &grad, nullptr);
  return grad;
}

Vec MlpNet::GradInput(const Vec& input, const Vec& cotangent) const {
  Tape tape;
  Forward(input, tape);
  Vec grad;
  Backward(tape, cotangent, 1.0, nullptr, &grad);
  return grad;
}

// Snapshot format (text):
//   clipadp-mlp 1 <n_in> <n_out> <tanh|linear> <slope> <count>
//   one weight per line, canonical order, 17 significant digits
void MlpNet::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("MlpNet::Save: cannot open " + path);
  out << kSnapshotMagic << ' ' << kSnapshotVersion << ' ' << sizes_[0] << ' '
      << sizes_[3] << ' '
      << (out_ == OutputActivation::kTanh ? "tanh" : "linear") << ' '
      << std::setprecision(17) << slope_ << ' ' << weights_.size() << '\n';
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    out << weights_[i] << '\n';
  }
  if (!out) throw Error("MlpNet::Save: write failed for " + path);
}

MlpNet MlpNet::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("MlpNet::Load: cannot open " + path);
  std::string magic, activation;
  int version = 0, n_in = 0, n_out = 0;
  double slope = 0.0;
  Eigen::Index count = 0;
  in >> magic >> version >> n_in >> n_out >> activation >> slope >> count;
  if (!in || magic != kSnapshotMagic) {
    throw Error("MlpNet::Load: " + path + " is not a weight snapshot");
  }
  if (version != kSnapshotVersion) {
    throw Error("MlpNet::Load: unsupported snapshot version " +
                std::to_string(version));
  }
  OutputActivation out;
  if (activation == "tanh") {
    out = OutputActivation::kTanh;
  } else if (activation == "linear") {
    out = OutputActivation::kLinear;
  } else {
    throw Error("MlpNet::Load: unknown activation '" + activation + "'");
  }
  MlpNet net(n_in, n_out, out, slope);
  if (count != net.weights_.size()) {
    throw Error("MlpNet::Load: weight count does not match architecture");
  }
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(in >> net.weights_[i])) {
      throw Error("MlpNet::Load: truncated snapshot " + path);
    }
  }
  return net;
}

}  // namespace clipadp
