#include "robqunn/classical.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "robqunn/hash.hpp"
#include "robqunn/rng.hpp"

namespace robqunn {

namespace {

void check_features(std::span<const double> features) {
  if (features.size() != static_cast<std::size_t>(DenseHead::kInputs)) {
    throw std::invalid_argument(
        fmt::format("dense head expects {} features, got {}", DenseHead::kInputs, features.size()));
  }
}

}  // namespace

ConvLayer ConvLayer::random(std::uint64_t seed) {
  ConvLayer layer;
  layer.seed = seed;
  Rng rng(seed);
  for (auto& k : layer.kernels) k = uniform(rng, -1.0, 1.0);
  return layer;
}

std::string ConvLayer::serialize() const {
  std::string out = fmt::format("conv seed = {}\nkernels =", seed);
  for (double k : kernels) out += fmt::format(" {:.17g}", k);
  out += "\nbias =";
  for (double b : bias) out += fmt::format(" {:.17g}", b);
  out += "\n";
  return out;
}

std::string ConvLayer::fingerprint() const { return short_fingerprint(serialize()); }

FeatureMap conv_forward(const Image& image, const ConvLayer& layer) {
  constexpr int K = ConvLayer::kKernel;
  constexpr int S = ConvLayer::kStride;
  const int rows = image.rows();
  const int cols = image.cols();
  if (rows < K || cols < K || (rows - K) % S != 0 || (cols - K) % S != 0) {
    throw std::invalid_argument(fmt::format("cannot convolve a {}x{} image", rows, cols));
  }
  FeatureMap out((rows - K) / S + 1, (cols - K) / S + 1, ConvLayer::kFilters);
  for (int i = 0; i < out.height(); ++i) {
    for (int j = 0; j < out.width(); ++j) {
      for (int f = 0; f < ConvLayer::kFilters; ++f) {
        double acc = layer.bias[static_cast<std::size_t>(f)];
        for (int m = 0; m < K; ++m) {
          for (int n = 0; n < K; ++n) acc += image.pixels(S * i + m, S * j + n) * layer.kernel(f, m, n);
        }
        out(i, j, f) = std::max(0.0, acc);
      }
    }
  }
  return out;
}

ImageGradient conv_input_gradient(const ConvLayer& layer, const FeatureMap& upstream,
                                  const FeatureMap& activations) {
  constexpr int K = ConvLayer::kKernel;
  constexpr int S = ConvLayer::kStride;
  if (!upstream.same_shape(activations) || upstream.channels() != ConvLayer::kFilters) {
    throw std::invalid_argument("conv gradient: upstream and activation shapes differ");
  }
  ImageGradient grad((upstream.height() - 1) * S + K, (upstream.width() - 1) * S + K);
  for (int i = 0; i < upstream.height(); ++i) {
    for (int j = 0; j < upstream.width(); ++j) {
      for (int f = 0; f < ConvLayer::kFilters; ++f) {
        if (activations(i, j, f) <= 0.0) continue;
        const double g = upstream(i, j, f);
        for (int m = 0; m < K; ++m) {
          for (int n = 0; n < K; ++n) grad(S * i + m, S * j + n) += g * layer.kernel(f, m, n);
        }
      }
    }
  }
  return grad;
}

DenseHead DenseHead::random(std::uint64_t seed) {
  DenseHead head;
  Rng rng(seed);
  for (auto& w : head.weights) w = uniform(rng, -0.05, 0.05);
  return head;
}

std::vector<double> dense_logits(std::span<const double> features, const DenseHead& head) {
  check_features(features);
  std::vector<double> logits(head.bias);
  for (int o = 0; o < DenseHead::kOutputs; ++o) {
    const double* row = head.weights.data() + static_cast<std::size_t>(o) * DenseHead::kInputs;
    double acc = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) acc += row[i] * features[i];
    logits[static_cast<std::size_t>(o)] += acc;
  }
  return logits;
}

std::vector<double> softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    sum += out[i];
  }
  for (auto& p : out) p /= sum;
  return out;
}

std::vector<double> dense_forward(std::span<const double> features, const DenseHead& head) {
  return softmax(dense_logits(features, head));
}

HeadGradients& HeadGradients::operator+=(const HeadGradients& o) {
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] += o.weights[i];
  for (std::size_t i = 0; i < bias.size(); ++i) bias[i] += o.bias[i];
  return *this;
}

HeadGradients& HeadGradients::operator*=(double s) {
  for (auto& w : weights) w *= s;
  for (auto& b : bias) b *= s;
  return *this;
}

LossAndGrads loss_and_grads(std::span<const double> probs, int label,
                            std::span<const double> features, const DenseHead& head) {
  check_features(features);
  if (label < 0 || label >= DenseHead::kOutputs || probs.size() != DenseHead::kOutputs) {
    throw std::invalid_argument(fmt::format("bad label {} or probability vector size {}", label,
                                            probs.size()));
  }
  LossAndGrads out;
  out.loss = -std::log(probs[static_cast<std::size_t>(label)]);
  out.features.assign(features.size(), 0.0);
  for (int o = 0; o < DenseHead::kOutputs; ++o) {
    const double d = probs[static_cast<std::size_t>(o)] - (o == label ? 1.0 : 0.0);
    out.head.bias[static_cast<std::size_t>(o)] = d;
    const std::size_t row = static_cast<std::size_t>(o) * DenseHead::kInputs;
    for (std::size_t i = 0; i < features.size(); ++i) {
      out.head.weights[row + i] = d * features[i];
      out.features[i] += d * head.weights[row + i];
    }
  }
  return out;
}

void adam_step(DenseHead& head, AdamState& state, const HeadGradients& grads, double lr) {
  if (grads.weights.size() != head.weights.size() || grads.bias.size() != head.bias.size() ||
      state.m.weights.size() != head.weights.size() || state.v.bias.size() != head.bias.size()) {
    throw std::invalid_argument("adam: gradient/state shapes do not match the head");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  auto update = [&](std::vector<double>& param, const std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      param[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  };
  update(head.weights, grads.weights, state.m.weights, state.v.weights);
  update(head.bias, grads.bias, state.m.bias, state.v.bias);
}

}  // namespace robqunn
