#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "robqunn/classical.hpp"
#include "robqunn/config.hpp"
#include "robqunn/errors.hpp"
#include "robqunn/harness.hpp"
#include "robqunn/model.hpp"
#include "robqunn/rng.hpp"

namespace {

using namespace robqunn;

Image random_image(Rng& rng, int label = 0) {
  PixelGrid g(kImageSide, kImageSide);
  for (auto& v : g.values) v = uniform01(rng);
  return Image(std::move(g), label);
}

FeatureMap random_map(Rng& rng) {
  FeatureMap fm(14, 14, 4);
  for (auto& v : fm.data()) v = uniform(rng, -1, 1);
  return fm;
}

DenseHead random_head(Rng& rng, double scale) {
  DenseHead h;
  for (auto& w : h.weights) w = uniform(rng, -scale, scale);
  for (auto& b : h.bias) b = uniform(rng, -scale, scale);
  return h;
}

// Pre-activation of output (i, j, f) by a direct loop over the kernel window.
double naive_preactivation(const Image& image, const ConvLayer& layer, int i, int j, int f) {
  double s = layer.bias[static_cast<std::size_t>(f)];
  for (int m = 0; m < 2; ++m) {
    for (int n = 0; n < 2; ++n) s += image.pixels(2 * i + m, 2 * j + n) * layer.kernel(f, m, n);
  }
  return s;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("robqunn_classical_" + name);
}

TEST(ConvForward, ZeroImageZeroBiasIsZero) {
  const auto fm = conv_forward(Image(PixelGrid(28, 28), 0), ConvLayer::random(1));
  ASSERT_EQ(fm.size(), 784u);
  for (double v : fm.data()) EXPECT_EQ(v, 0.0);
}

TEST(ConvForward, TopLeftKernelCopiesTopLeftPixel) {
  Rng rng(2);
  ConvLayer layer;
  for (int f = 0; f < 4; ++f) layer.kernel(f, 0, 0) = 1.0;
  const auto image = random_image(rng);
  const auto fm = conv_forward(image, layer);
  for (int i = 0; i < 14; ++i) {
    for (int j = 0; j < 14; ++j) {
      for (int f = 0; f < 4; ++f) EXPECT_EQ(fm(i, j, f), image.pixels(2 * i, 2 * j));
    }
  }
}

TEST(ConvForward, MatchesQuadrupleLoopOracle) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    auto layer = ConvLayer::random(rng());
    for (auto& b : layer.bias) b = uniform(rng, -0.5, 0.5);
    const auto image = random_image(rng);
    const auto fm = conv_forward(image, layer);
    for (int i = 0; i < 14; ++i) {
      for (int j = 0; j < 14; ++j) {
        for (int f = 0; f < 4; ++f) {
          ASSERT_NEAR(fm(i, j, f), std::max(0.0, naive_preactivation(image, layer, i, j, f)), 1e-12);
        }
      }
    }
  }
}

TEST(ConvForward, RejectsUntileableImage) {
  EXPECT_THROW(conv_forward(Image(PixelGrid(27, 28), 0), ConvLayer::random(1)), std::invalid_argument);
}

TEST(ConvLayer, RandomInitIsSeededAndBounded) {
  const auto a = ConvLayer::random(5);
  EXPECT_EQ(a, ConvLayer::random(5));
  EXPECT_NE(a.kernels, ConvLayer::random(6).kernels);
  for (double k : a.kernels) {
    EXPECT_GE(k, -1.0);
    EXPECT_LE(k, 1.0);
  }
  for (double b : a.bias) EXPECT_EQ(b, 0.0);
  EXPECT_EQ(a.fingerprint().size(), 16u);
}

TEST(ConvInputGradient, ZeroUpstreamIsZero) {
  Rng rng(4);
  const auto layer = ConvLayer::random(4);
  const auto image = random_image(rng);
  const auto g = conv_input_gradient(layer, FeatureMap(14, 14, 4), conv_forward(image, layer));
  for (double v : g.values) EXPECT_EQ(v, 0.0);
}

TEST(ConvInputGradient, DeadReluGivesZero) {
  Rng rng(5);
  ConvLayer layer;
  for (auto& k : layer.kernels) k = -uniform(rng, 0.1, 1.0);
  const auto image = random_image(rng);
  const auto acts = conv_forward(image, layer);
  const auto g = conv_input_gradient(layer, random_map(rng), acts);
  for (double v : g.values) EXPECT_EQ(v, 0.0);
}

TEST(ConvInputGradient, MatchesFiniteDifference) {
  Rng rng(6);
  constexpr double h = 1e-5;
  int checked = 0;
  for (int t = 0; t < 10; ++t) {
    const auto layer = ConvLayer::random(rng());
    const auto image = random_image(rng);
    const auto upstream = random_map(rng);
    const auto g = conv_input_gradient(layer, upstream, conv_forward(image, layer));
    auto objective = [&](const Image& x) {
      const auto fm = conv_forward(x, layer);
      return std::inner_product(fm.data().begin(), fm.data().end(), upstream.data().begin(), 0.0);
    };
    for (int s = 0; s < 30; ++s) {
      const int r = static_cast<int>(uniform_index(rng, 28));
      const int c = static_cast<int>(uniform_index(rng, 28));
      bool near_kink = false;
      for (int f = 0; f < 4; ++f) near_kink |= std::abs(naive_preactivation(image, layer, r / 2, c / 2, f)) < 1e-3;
      if (near_kink) continue;  // the finite difference would straddle the ReLU kink
      auto plus = image;
      auto minus = image;
      plus.pixels(r, c) += h;
      minus.pixels(r, c) -= h;
      ASSERT_NEAR(g(r, c), (objective(plus) - objective(minus)) / (2 * h), 1e-6);
      ++checked;
    }
  }
  EXPECT_GE(checked, 200);
}

TEST(ConvInputGradient, RejectsShapeMismatch) {
  const auto layer = ConvLayer::random(1);
  EXPECT_THROW(conv_input_gradient(layer, FeatureMap(14, 14, 4), FeatureMap(14, 13, 4)), std::invalid_argument);
}

TEST(DenseForward, ZeroHeadIsUniform) {
  const DenseHead head;
  const std::vector<double> features(784, 0.3);
  for (double p : dense_forward(features, head)) EXPECT_NEAR(p, 0.1, 1e-15);
}

TEST(DenseForward, LargeBiasSaturates) {
  DenseHead head;
  head.bias[0] = 1000.0;
  const auto p = dense_forward(std::vector<double>(784, 0.0), head);
  EXPECT_EQ(p[0], 1.0);
  for (int k = 1; k < 10; ++k) {
    EXPECT_GE(p[static_cast<std::size_t>(k)], 0.0);
    EXPECT_LT(p[static_cast<std::size_t>(k)], 1e-300);
  }
}

TEST(DenseForward, LogitsAreAffine) {
  Rng rng(7);
  const auto head = random_head(rng, 0.1);
  std::vector<double> features(784);
  for (auto& f : features) f = uniform(rng, -1, 1);
  const auto logits = dense_logits(features, head);
  for (int o = 0; o < 10; ++o) {
    long double s = head.bias[static_cast<std::size_t>(o)];
    for (int i = 0; i < 784; ++i) s += static_cast<long double>(head.w(o, i)) * features[static_cast<std::size_t>(i)];
    EXPECT_NEAR(logits[static_cast<std::size_t>(o)], static_cast<double>(s), 1e-12);
  }
}

TEST(Softmax, MatchesHighPrecisionOracle) {
  const std::vector<double> logits{1, 2, 3, 0, 0, 0, 0, 0, 0, 0};
  const auto p = softmax(logits);
  long double z = 0;
  for (double l : logits) z += std::exp(static_cast<long double>(l));
  for (std::size_t k = 0; k < logits.size(); ++k) {
    EXPECT_NEAR(p[k], static_cast<double>(std::exp(static_cast<long double>(logits[k])) / z), 1e-15);
  }
}

TEST(Properties, SoftmaxSumsToOneAndIsPositive) {
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> logits(10);
    for (auto& l : logits) l = uniform(rng, -30, 30);
    const auto p = softmax(logits);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (double v : p) EXPECT_GT(v, 0.0);
  }
}

TEST(LossAndGrads, CertainPredictionHasZeroLoss) {
  std::vector<double> probs(10, 0.0);
  probs[3] = 1.0;
  const auto lg = loss_and_grads(probs, 3, std::vector<double>(784, 0.5), DenseHead{});
  EXPECT_EQ(lg.loss, 0.0);
  for (double g : lg.head.bias) EXPECT_EQ(g, 0.0);
}

TEST(LossAndGrads, UniformPredictionCostsLnTen) {
  const auto lg = loss_and_grads(std::vector<double>(10, 0.1), 7, std::vector<double>(784, 0.0), DenseHead{});
  EXPECT_NEAR(lg.loss, std::log(10.0), 1e-12);
  EXPECT_NEAR(lg.loss, 2.302585, 1e-6);
}

TEST(LossAndGrads, AllGradientsMatchFiniteDifference) {
  Rng rng(9);
  constexpr double h = 1e-5;
  for (int t = 0; t < 10; ++t) {
    auto head = random_head(rng, 0.1);
    std::vector<double> features(784);
    for (auto& f : features) f = uniform(rng, -1, 1);
    const int label = static_cast<int>(uniform_index(rng, 10));
    auto loss = [&](const DenseHead& hd, const std::vector<double>& x) {
      return -std::log(dense_forward(x, hd)[static_cast<std::size_t>(label)]);
    };
    const auto lg = loss_and_grads(dense_forward(features, head), label, features, head);
    EXPECT_NEAR(lg.loss, loss(head, features), 1e-12);
    for (int s = 0; s < 20; ++s) {
      const auto wi = static_cast<std::size_t>(uniform_index(rng, head.weights.size()));
      auto hp = head;
      auto hm = head;
      hp.weights[wi] += h;
      hm.weights[wi] -= h;
      ASSERT_NEAR(lg.head.weights[wi], (loss(hp, features) - loss(hm, features)) / (2 * h), 1e-6);

      const auto bi = static_cast<std::size_t>(uniform_index(rng, 10));
      hp = head;
      hm = head;
      hp.bias[bi] += h;
      hm.bias[bi] -= h;
      ASSERT_NEAR(lg.head.bias[bi], (loss(hp, features) - loss(hm, features)) / (2 * h), 1e-6);

      const auto fi = static_cast<std::size_t>(uniform_index(rng, 784));
      auto xp = features;
      auto xm = features;
      xp[fi] += h;
      xm[fi] -= h;
      ASSERT_NEAR(lg.features[fi], (loss(head, xp) - loss(head, xm)) / (2 * h), 1e-6);
    }
  }
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  Rng rng(10);
  auto head = random_head(rng, 0.05);
  const auto before = head;
  AdamState state;
  for (int i = 0; i < 3; ++i) adam_step(head, state, HeadGradients{}, 0.001);
  EXPECT_EQ(head, before);
  EXPECT_EQ(state.step, 3);
  for (double m : state.m.weights) EXPECT_EQ(m, 0.0);
  for (double v : state.v.bias) EXPECT_EQ(v, 0.0);
}

TEST(Adam, FirstStepMovesByLearningRateAgainstGradientSign) {
  DenseHead head;
  AdamState state;
  HeadGradients g;
  g.weights[0] = 3.7;
  g.weights[1] = -1e-3;
  g.bias[2] = 250.0;
  adam_step(head, state, g, 0.01);
  EXPECT_NEAR(head.weights[0], -0.01, 1e-9);
  EXPECT_NEAR(head.weights[1], 0.01, 1e-7);
  EXPECT_NEAR(head.bias[2], -0.01, 1e-9);
  EXPECT_EQ(head.weights[2], 0.0);
}

TEST(Adam, TwoStepHandTrace) {
  // g = 0.5 twice, lr = 0.01, starting from w = 0.2.
  //   step 1: m = 0.05,  v = 0.00025,     m_hat = 0.5, v_hat = 0.25
  //   step 2: m = 0.095, v = 0.00049975,  m_hat = 0.095 / 0.19 = 0.5,
  //           v_hat = 0.00049975 / 0.001999 = 0.25
  // so each step subtracts 0.01 * 0.5 / (0.5 + 1e-8).
  DenseHead head;
  head.weights[5] = 0.2;
  AdamState state;
  HeadGradients g;
  g.weights[5] = 0.5;
  adam_step(head, state, g, 0.01);
  EXPECT_NEAR(state.m.weights[5], 0.05, 1e-15);
  EXPECT_NEAR(state.v.weights[5], 0.00025, 1e-15);
  EXPECT_NEAR(head.weights[5], 0.2 - 0.005 / (0.5 + 1e-8), 1e-12);
  adam_step(head, state, g, 0.01);
  EXPECT_NEAR(state.m.weights[5], 0.095, 1e-15);
  EXPECT_NEAR(state.v.weights[5], 0.00049975, 1e-15);
  EXPECT_NEAR(head.weights[5], 0.2 - 2 * 0.005 / (0.5 + 1e-8), 1e-12);
  EXPECT_EQ(state.step, 2);
}

TEST(Adam, RejectsMismatchedShapes) {
  DenseHead head;
  AdamState state;
  HeadGradients g;
  g.weights.resize(3);
  EXPECT_THROW(adam_step(head, state, g, 0.001), std::invalid_argument);
}

TEST(DenseHead, RandomInitIsSeededAndBounded) {
  const auto h = DenseHead::random(3);
  EXPECT_EQ(h, DenseHead::random(3));
  EXPECT_NE(h.weights, DenseHead::random(4).weights);
  for (double w : h.weights) {
    EXPECT_GE(w, -0.05);
    EXPECT_LE(w, 0.05);
  }
  for (double b : h.bias) EXPECT_EQ(b, 0.0);
}

// End-to-end dJ/dx through head, extractor, and encoding for both families.
void check_end_to_end_gradient(const Model& model, Rng& rng, int cases, int pixels_per_case) {
  constexpr double h = 1e-5;
  for (int c = 0; c < cases; ++c) {
    auto image = random_image(rng, static_cast<int>(uniform_index(rng, 10)));
    for (auto& v : image.pixels.values) v = 0.01 + 0.98 * v;
    const auto ig = model.loss_gradient(image, image.label);
    EXPECT_NEAR(ig.loss, -std::log(model.probabilities(image)[static_cast<std::size_t>(image.label)]), 1e-12);
    for (int s = 0; s < pixels_per_case; ++s) {
      const auto idx = static_cast<std::size_t>(uniform_index(rng, 784));
      if (!model.extractor().is_quantum()) {
        const int r = static_cast<int>(idx) / 28;
        const int col = static_cast<int>(idx) % 28;
        bool near_kink = false;
        for (int f = 0; f < 4; ++f) {
          near_kink |= std::abs(naive_preactivation(image, model.extractor().conv(), r / 2, col / 2, f)) < 1e-3;
        }
        if (near_kink) continue;
      }
      auto plus = image;
      auto minus = image;
      plus.pixels.values[idx] += h;
      minus.pixels.values[idx] -= h;
      const double fd = (model.loss_gradient(plus, image.label).loss - model.loss_gradient(minus, image.label).loss) / (2 * h);
      ASSERT_NEAR(ig.gradient.values[idx], fd, 1e-5) << model.name() << " pixel " << idx;
    }
  }
}

TEST(EndToEndGradient, ClassicalModelMatchesFiniteDifference) {
  Rng rng(11);
  const Model model(Extractor(ConvLayer::random(11)), random_head(rng, 0.3));
  check_end_to_end_gradient(model, rng, 20, 10);
}

TEST(EndToEndGradient, QuantumModelsMatchFiniteDifference) {
  Rng rng(12);
  for (auto kind : kAllAnsatzKinds) {
    const Model model(Extractor(build_ansatz(kind, 4, rng())), random_head(rng, 0.3));
    check_end_to_end_gradient(model, rng, 20, 3);
  }
}

TEST(Properties, TrainingLeavesExtractorsFrozen) {
  Rng rng(13);
  ExperimentConfig config;
  config.epochs = 3;
  config.seed = 99;
  std::vector<Image> images;
  for (int i = 0; i < 12; ++i) images.push_back(random_image(rng, i % 10));
  for (const auto& extractor : {Extractor(ConvLayer::random(1)), Extractor(build_ansatz(AnsatzKind::ZZFull, 4, 2))}) {
    const auto before = extractor.is_quantum() ? extractor.ansatz().serialize() : extractor.conv().serialize();
    std::vector<FeatureMap> features;
    for (const auto& im : images) features.push_back(extractor.forward(im));
    const auto result = train_head(extractor, features, images, config);
    const auto& trained = result.model.extractor();
    const auto after = trained.is_quantum() ? trained.ansatz().serialize() : trained.conv().serialize();
    EXPECT_EQ(before, after);
    EXPECT_EQ(trained, extractor);
    EXPECT_NE(result.model.head(), DenseHead::random(config_seed(config, "head/" + extractor.model_name())));
  }
}

TEST(Checkpoint, RoundTripsBothFamilies) {
  Rng rng(14);
  for (const auto& extractor : {Extractor(ConvLayer::random(21)), Extractor(build_ansatz(AnsatzKind::ZZStar, 4, 22))}) {
    const Model model(extractor, random_head(rng, 0.05));
    const auto path = temp_path(model.name() + ".ckpt");
    save_checkpoint(path, model);
    const auto back = load_checkpoint(path);
    EXPECT_EQ(back.extractor(), model.extractor());
    EXPECT_EQ(back.head(), model.head());
    EXPECT_EQ(std::filesystem::file_size(path), 8u + 4 + 4 + 8 + 16 + 4 + 4 + 7850u * 8);
    std::filesystem::remove(path);
  }
}

TEST(Checkpoint, RejectsCorruptFiles) {
  const Model model(Extractor(build_ansatz(AnsatzKind::NoEnt, 4, 5)), DenseHead::random(1));
  const auto path = temp_path("corrupt.ckpt");
  save_checkpoint(path, model);
  {
    // Flip one byte of the seed so the rebuilt extractor no longer matches.
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(16);
    f.put('\x7f');
  }
  EXPECT_THROW(load_checkpoint(path), DataError);
  save_checkpoint(path, model);
  std::filesystem::resize_file(path, 60);
  EXPECT_THROW(load_checkpoint(path), DataError);
  EXPECT_THROW(load_checkpoint(temp_path("does-not-exist.ckpt")), DataError);
  std::filesystem::remove(path);
}

}  // namespace
