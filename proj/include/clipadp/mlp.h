#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>

#include "clipadp/types.h"

namespace clipadp {

enum class OutputActivation { kTanh, kLinear };

// Multilayer perceptron with two hidden tanh layers of six nodes and
// shortcut connections between every pair of layers. Every non-input node
// has a bias.
//
// Weight layout (canonical, fixed): destination layer ascending, then
// destination node, then [bias, sources from layer 0, layer 1, ...].
class MlpNet {
 public:
  static constexpr int kHidden = 6;
  static constexpr int kLayers = 4;

  MlpNet() = default;
  MlpNet(int n_in, int n_out, OutputActivation out, double slope = 1.0);

  // Weights drawn i.i.d. uniform on [-0.1, 0.1].
  static MlpNet Random(int n_in, int n_out, OutputActivation out, double slope,
                       std::mt19937_64& rng);

  static int WeightCount(int n_in, int n_out);

  int n_in() const { return sizes_[0]; }
  int n_out() const { return sizes_[3]; }
  const std::array<int, kLayers>& sizes() const { return sizes_; }
  OutputActivation output_activation() const { return out_; }
  double slope() const { return slope_; }
  void set_slope(double slope) { slope_ = slope; }

  const Weights& weights() const { return weights_; }
  Weights& mutable_weights() { return weights_; }
  void set_weights(const Weights& w);

  // Node activations of one forward pass, kept for reverse accumulation.
  struct Tape {
    std::array<std::array<double, kMaxDim>, kLayers> act{};
  };

  Vec Forward(const Vec& input) const;
  Vec Forward(const Vec& input, Tape& tape) const;

  // Reverse pass for cotangent c: adds scale * d(c . out)/dw into
  // weight_grad (if non-null) and writes d(c . out)/dinput into input_grad
  // (if non-null).
  void Backward(const Tape& tape, const Vec& cotangent, double scale,
                Weights* weight_grad, Vec* input_grad) const;

  Weights GradWeights(const Vec& input, const Vec& cotangent) const;
  Vec GradInput(const Vec& input, const Vec& cotangent) const;

  // Offset of destination node `node` of layer `layer` (its bias weight).
  int NodeOffset(int layer, int node) const;

  void Save(const std::string& path) const;
  static MlpNet Load(const std::string& path);

 private:
  void CheckInput(const Vec& input) const;

  std::array<int, kLayers> sizes_{0, kHidden, kHidden, 0};
  std::array<int, kLayers> layer_offset_{};  // first weight of each layer
  OutputActivation out_ = OutputActivation::kLinear;
  double slope_ = 1.0;
  Weights weights_;
};

}  // namespace clipadp
