#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "robqunn/ansatz.hpp"
#include "robqunn/classical.hpp"
#include "robqunn/tensor.hpp"

namespace robqunn {

struct InputGradient {
  double loss = 0.0;
  ImageGradient gradient;  // dJ/dx
};

/// Anything an attack can target: class probabilities plus the input
/// gradient of the cross-entropy loss.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::vector<double> probabilities(const Image& image) const = 0;
  virtual InputGradient loss_gradient(const Image& image, int label) const = 0;
  virtual std::string fingerprint() const = 0;

  int predict(const Image& image) const;
};

/// Frozen feature extractor: classical conv or a quanvolutional ansatz.
class Extractor {
 public:
  explicit Extractor(ConvLayer conv) : impl_(std::move(conv)) {}
  explicit Extractor(Ansatz ansatz) : impl_(std::move(ansatz)) {}

  bool is_quantum() const { return std::holds_alternative<Ansatz>(impl_); }
  const ConvLayer& conv() const { return std::get<ConvLayer>(impl_); }
  const Ansatz& ansatz() const { return std::get<Ansatz>(impl_); }

  /// "CNN" or "QuNN-<AnsatzKind>".
  std::string model_name() const;
  std::string fingerprint() const;
  std::uint64_t seed() const;

  FeatureMap forward(const Image& image) const;
  ImageGradient input_gradient(const Image& image, const FeatureMap& upstream,
                               const FeatureMap& activations) const;

  bool operator==(const Extractor&) const = default;

 private:
  std::variant<ConvLayer, Ansatz> impl_;
};

/// Frozen extractor followed by the trainable dense softmax head.
class Model : public Classifier {
 public:
  Model(Extractor extractor, DenseHead head)
      : extractor_(std::move(extractor)), head_(std::move(head)) {}

  const Extractor& extractor() const { return extractor_; }
  const DenseHead& head() const { return head_; }
  DenseHead& head() { return head_; }
  std::string name() const { return extractor_.model_name(); }

  std::vector<double> probabilities(const Image& image) const override;
  InputGradient loss_gradient(const Image& image, int label) const override;
  /// Extractor fingerprint; the head does not participate.
  std::string fingerprint() const override { return extractor_.fingerprint(); }

 private:
  Extractor extractor_;
  DenseHead head_;
};

/// Checkpoint layout (little-endian):
///   "RQNNCKPT" | u32 version=1 | u32 extractor code (0 = CNN, 1 + AnsatzKind)
///   | u64 extractor seed | 16-byte extractor fingerprint | u32 outputs | u32 inputs
///   | weights (outputs*inputs f64, row-major) | bias (outputs f64)
void save_checkpoint(const std::filesystem::path& path, const Model& model);

/// Rebuilds the extractor from its code and seed and checks the stored
/// fingerprint. Throws DataError on any mismatch or truncation.
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace robqunn
