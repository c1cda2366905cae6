#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "robqunn/model.hpp"
#include "robqunn/tensor.hpp"

namespace robqunn {

enum class AttackKind { FGSM, PGD, MIM };

std::string_view to_string(AttackKind kind);
AttackKind parse_attack_kind(std::string_view name);

struct AttackSpec {
  AttackKind kind = AttackKind::FGSM;
  double epsilon = 0.0;
  double step_size = 0.0;  // PGD / MIM
  int iterations = 1;      // PGD / MIM
  double momentum = 0.0;   // MIM

  static constexpr int kDefaultIterations = 10;
  static constexpr double kDefaultStepRatio = 0.25;  // step = ratio * epsilon
  static constexpr double kDefaultMomentum = 1.0;

  static AttackSpec fgsm(double epsilon) { return {AttackKind::FGSM, epsilon, 0.0, 1, 0.0}; }
  static AttackSpec pgd(double epsilon, int iterations = kDefaultIterations,
                        double step_ratio = kDefaultStepRatio) {
    return {AttackKind::PGD, epsilon, step_ratio * epsilon, iterations, 0.0};
  }
  static AttackSpec mim(double epsilon, int iterations = kDefaultIterations,
                        double step_ratio = kDefaultStepRatio, double momentum = kDefaultMomentum) {
    return {AttackKind::MIM, epsilon, step_ratio * epsilon, iterations, momentum};
  }

  /// Throws std::invalid_argument on negative epsilon/step/momentum or
  /// iterations < 1 for the iterative kinds.
  void validate() const;
  bool operator==(const AttackSpec&) const = default;
};

/// sign(0) = 0.
double sign(double v);

/// x' = clip(x + eps * sign(grad J(x)), 0, 1).
Image fgsm(const Classifier& model, const Image& image, const AttackSpec& spec);
/// x_{k+1} = Proj(x_k + step * sign(grad J(x_k))), x_0 = x. Proj clamps each
/// pixel into [x - eps, x + eps], then into [0, 1].
Image pgd(const Classifier& model, const Image& image, const AttackSpec& spec);
/// g_{k+1} = mu g_k + grad / |grad|_1 (term dropped when |grad|_1 = 0),
/// x_{k+1} = Proj(x_k + step * sign(g_{k+1})).
Image mim(const Classifier& model, const Image& image, const AttackSpec& spec);
/// Dispatches on spec.kind.
Image attack(const Classifier& model, const Image& image, const AttackSpec& spec);

struct AdversarialBatch {
  std::vector<Image> originals;
  std::vector<Image> adversarials;
  std::string source_fingerprint;
  AttackSpec spec;
};

AdversarialBatch generate_batch(const Classifier& source, std::span<const Image> images,
                                const AttackSpec& spec);

/// Fraction of images classified as their label. Throws std::invalid_argument when empty.
double accuracy(const Classifier& model, std::span<const Image> images);

struct RobustnessCurve {
  std::string model;
  std::string fingerprint;
  AttackKind attack = AttackKind::FGSM;
  std::vector<std::pair<double, double>> points;  // (epsilon, accuracy)
};

/// White-box sweep: examples crafted against `model` and scored on it. The
/// specs must share a kind and list strictly increasing epsilons.
RobustnessCurve evaluate_robustness(const Classifier& model, std::string model_name,
                                    std::span<const Image> images,
                                    std::span<const AttackSpec> spec_grid);

/// Accuracy of `target` on examples crafted against `source`.
double transfer_attack(const Classifier& source, const Classifier& target,
                       std::span<const Image> images, const AttackSpec& spec);

/// Batch file (little-endian):
///   "RQNNADVB" | u32 version=1 | u32 kind | f64 epsilon | f64 step | u32 iterations
///   | f64 momentum | 16-byte source fingerprint | u32 count | u32 rows | u32 cols
///   | per example: u32 label, original pixels (f64), adversarial pixels (f64)
void write_adversarial_batch(const std::filesystem::path& path, const AdversarialBatch& batch);
AdversarialBatch read_adversarial_batch(const std::filesystem::path& path);

}  // namespace robqunn
