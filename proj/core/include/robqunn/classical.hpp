#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "robqunn/tensor.hpp"

namespace robqunn {

/// Frozen 2x2 stride-2 convolution with 4 filters followed by ReLU.
struct ConvLayer {
  static constexpr int kFilters = 4;
  static constexpr int kKernel = 2;
  static constexpr int kStride = 2;

  std::array<double, kFilters * kKernel * kKernel> kernels{};  // [filter][m][n]
  std::array<double, kFilters> bias{};
  std::uint64_t seed = 0;

  /// Kernels uniform in [-1, 1], zero bias.
  static ConvLayer random(std::uint64_t seed);

  double kernel(int f, int m, int n) const {
    return kernels[static_cast<std::size_t>((f * kKernel + m) * kKernel + n)];
  }
  double& kernel(int f, int m, int n) {
    return kernels[static_cast<std::size_t>((f * kKernel + m) * kKernel + n)];
  }

  std::string serialize() const;
  std::string fingerprint() const;
  bool operator==(const ConvLayer&) const = default;
};

/// Throws std::invalid_argument if the image does not tile with 2x2 stride 2.
FeatureMap conv_forward(const Image& image, const ConvLayer& layer);

/// Backprop through ReLU (mask: activation > 0) and the strided convolution.
ImageGradient conv_input_gradient(const ConvLayer& layer, const FeatureMap& upstream,
                                  const FeatureMap& activations);

/// Dense softmax classifier over the flattened 14x14x4 feature map.
struct DenseHead {
  static constexpr int kInputs = 14 * 14 * 4;
  static constexpr int kOutputs = kNumClasses;

  std::vector<double> weights = std::vector<double>(kOutputs * kInputs, 0.0);  // row-major [out][in]
  std::vector<double> bias = std::vector<double>(kOutputs, 0.0);

  /// Weights uniform in [-0.05, 0.05], zero bias.
  static DenseHead random(std::uint64_t seed);

  double w(int o, int i) const { return weights[static_cast<std::size_t>(o * kInputs + i)]; }
  bool operator==(const DenseHead&) const = default;
};

std::vector<double> dense_logits(std::span<const double> features, const DenseHead& head);
/// Max-shifted softmax.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> dense_forward(std::span<const double> features, const DenseHead& head);

struct HeadGradients {
  std::vector<double> weights = std::vector<double>(DenseHead::kOutputs * DenseHead::kInputs, 0.0);
  std::vector<double> bias = std::vector<double>(DenseHead::kOutputs, 0.0);

  HeadGradients& operator+=(const HeadGradients& o);
  HeadGradients& operator*=(double s);
};

struct LossAndGrads {
  double loss = 0.0;
  HeadGradients head;
  std::vector<double> features;  // dJ/dfeatures
};

/// Sparse categorical cross-entropy -log(probs[label]) and its gradients.
LossAndGrads loss_and_grads(std::span<const double> probs, int label,
                            std::span<const double> features, const DenseHead& head);

struct AdamState {
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  HeadGradients m;  // first moments
  HeadGradients v;  // second moments
};

void adam_step(DenseHead& head, AdamState& state, const HeadGradients& grads, double lr);

}  // namespace robqunn
