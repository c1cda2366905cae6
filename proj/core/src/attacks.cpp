#include "robqunn/attacks.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "robqunn/binary_io.hpp"
#include "robqunn/errors.hpp"
#include "robqunn/parallel.hpp"

namespace robqunn {

namespace {

constexpr std::string_view kBatchMagic = "RQNNADVB";
constexpr std::uint32_t kBatchVersion = 1;

void check_kind(const AttackSpec& spec, AttackKind expected) {
  spec.validate();
  if (spec.kind != expected) {
    throw std::invalid_argument(fmt::format("{} called with a {} spec", to_string(expected),
                                            to_string(spec.kind)));
  }
}

/// Clamp into the epsilon ball around `origin`, then into [0, 1].
void project(PixelGrid& x, const PixelGrid& origin, double epsilon) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double o = origin.values[i];
    x.values[i] = std::clamp(std::clamp(x.values[i], o - epsilon, o + epsilon), 0.0, 1.0);
  }
}

Image iterate(const Classifier& model, const Image& image, const AttackSpec& spec) {
  Image x = image;
  if (spec.epsilon == 0.0) return x;
  std::vector<double> momentum(image.pixels.size(), 0.0);
  for (int k = 0; k < spec.iterations; ++k) {
    const auto grad = model.loss_gradient(x, image.label).gradient;
    if (spec.kind == AttackKind::MIM) {
      double l1 = 0.0;
      for (double g : grad.values) l1 += std::abs(g);
      for (std::size_t i = 0; i < momentum.size(); ++i) {
        momentum[i] = spec.momentum * momentum[i] + (l1 > 0.0 ? grad.values[i] / l1 : 0.0);
      }
      for (std::size_t i = 0; i < momentum.size(); ++i) {
        x.pixels.values[i] += spec.step_size * sign(momentum[i]);
      }
    } else {
      for (std::size_t i = 0; i < grad.size(); ++i) {
        x.pixels.values[i] += spec.step_size * sign(grad.values[i]);
      }
    }
    project(x.pixels, image.pixels, spec.epsilon);
  }
  return x;
}

}  // namespace

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::FGSM: return "FGSM";
    case AttackKind::PGD: return "PGD";
    case AttackKind::MIM: return "MIM";
  }
  return "?";
}

AttackKind parse_attack_kind(std::string_view name) {
  for (auto k : {AttackKind::FGSM, AttackKind::PGD, AttackKind::MIM}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown attack kind '" + std::string(name) + "'");
}

void AttackSpec::validate() const {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("attack epsilon must be >= 0");
  if (kind != AttackKind::FGSM) {
    if (iterations < 1) throw std::invalid_argument("iterative attacks need iterations >= 1");
    if (!(step_size >= 0.0)) throw std::invalid_argument("attack step size must be >= 0");
  }
  if (!(momentum >= 0.0)) throw std::invalid_argument("attack momentum must be >= 0");
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Image fgsm(const Classifier& model, const Image& image, const AttackSpec& spec) {
  check_kind(spec, AttackKind::FGSM);
  Image x = image;
  if (spec.epsilon == 0.0) return x;
  const auto grad = model.loss_gradient(image, image.label).gradient;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    x.pixels.values[i] = std::clamp(x.pixels.values[i] + spec.epsilon * sign(grad.values[i]), 0.0, 1.0);
  }
  return x;
}

Image pgd(const Classifier& model, const Image& image, const AttackSpec& spec) {
  check_kind(spec, AttackKind::PGD);
  return iterate(model, image, spec);
}

Image mim(const Classifier& model, const Image& image, const AttackSpec& spec) {
  check_kind(spec, AttackKind::MIM);
  return iterate(model, image, spec);
}

Image attack(const Classifier& model, const Image& image, const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackKind::FGSM: return fgsm(model, image, spec);
    case AttackKind::PGD: return pgd(model, image, spec);
    case AttackKind::MIM: return mim(model, image, spec);
  }
  throw std::invalid_argument("unknown attack kind");
}

AdversarialBatch generate_batch(const Classifier& source, std::span<const Image> images,
                                const AttackSpec& spec) {
  spec.validate();
  AdversarialBatch batch;
  batch.originals.assign(images.begin(), images.end());
  batch.adversarials.resize(images.size());
  batch.source_fingerprint = source.fingerprint();
  batch.spec = spec;
  parallel_for(images.size(), [&](std::size_t i) {
    batch.adversarials[i] = attack(source, images[i], spec);
  });
  return batch;
}

double accuracy(const Classifier& model, std::span<const Image> images) {
  if (images.empty()) throw std::invalid_argument("accuracy of an empty image set");
  std::vector<int> correct(images.size(), 0);
  parallel_for(images.size(), [&](std::size_t i) {
    correct[i] = model.predict(images[i]) == images[i].label;
  });
  std::size_t hits = 0;
  for (int c : correct) hits += static_cast<std::size_t>(c);
  return static_cast<double>(hits) / static_cast<double>(images.size());
}

RobustnessCurve evaluate_robustness(const Classifier& model, std::string model_name,
                                    std::span<const Image> images,
                                    std::span<const AttackSpec> spec_grid) {
  if (images.empty()) throw std::invalid_argument("robustness sweep over an empty image set");
  if (spec_grid.empty()) throw std::invalid_argument("robustness sweep needs at least one spec");
  RobustnessCurve curve;
  curve.model = std::move(model_name);
  curve.fingerprint = model.fingerprint();
  curve.attack = spec_grid.front().kind;
  for (std::size_t s = 0; s < spec_grid.size(); ++s) {
    const auto& spec = spec_grid[s];
    if (spec.kind != curve.attack) throw std::invalid_argument("robustness sweep mixes attack kinds");
    if (s > 0 && !(spec.epsilon > spec_grid[s - 1].epsilon)) {
      throw std::invalid_argument("robustness sweep epsilons must be strictly increasing");
    }
    const auto batch = generate_batch(model, images, spec);
    curve.points.emplace_back(spec.epsilon, accuracy(model, batch.adversarials));
  }
  return curve;
}

double transfer_attack(const Classifier& source, const Classifier& target,
                       std::span<const Image> images, const AttackSpec& spec) {
  return accuracy(target, generate_batch(source, images, spec).adversarials);
}

void write_adversarial_batch(const std::filesystem::path& path, const AdversarialBatch& batch) {
  if (batch.originals.size() != batch.adversarials.size()) {
    throw std::invalid_argument("adversarial batch: original/adversarial count mismatch");
  }
  io::Writer w;
  w.bytes(kBatchMagic);
  w.u32(kBatchVersion);
  w.u32(static_cast<std::uint32_t>(batch.spec.kind));
  w.f64(batch.spec.epsilon);
  w.f64(batch.spec.step_size);
  w.u32(static_cast<std::uint32_t>(batch.spec.iterations));
  w.f64(batch.spec.momentum);
  w.fixed(batch.source_fingerprint, 16);
  w.u32(static_cast<std::uint32_t>(batch.originals.size()));
  const int rows = batch.originals.empty() ? 0 : batch.originals.front().rows();
  const int cols = batch.originals.empty() ? 0 : batch.originals.front().cols();
  w.u32(static_cast<std::uint32_t>(rows));
  w.u32(static_cast<std::uint32_t>(cols));
  for (std::size_t i = 0; i < batch.originals.size(); ++i) {
    const auto& o = batch.originals[i];
    const auto& a = batch.adversarials[i];
    if (o.rows() != rows || o.cols() != cols || !a.pixels.same_shape(o.pixels)) {
      throw std::invalid_argument("adversarial batch: images differ in shape");
    }
    w.u32(static_cast<std::uint32_t>(o.label));
    w.f64s(o.pixels.values);
    w.f64s(a.pixels.values);
  }
  w.save(path);
}

AdversarialBatch read_adversarial_batch(const std::filesystem::path& path) {
  auto r = io::Reader::open(path);
  const std::string where = "adversarial batch " + path.string();
  if (r.bytes(kBatchMagic.size()) != kBatchMagic) throw DataError(where + ": bad magic");
  if (r.u32() != kBatchVersion) throw DataError(where + ": unsupported version");
  AdversarialBatch batch;
  const auto kind = r.u32();
  if (kind > 2) throw DataError(where + ": unknown attack kind");
  batch.spec.kind = static_cast<AttackKind>(kind);
  batch.spec.epsilon = r.f64();
  batch.spec.step_size = r.f64();
  batch.spec.iterations = static_cast<int>(r.u32());
  batch.spec.momentum = r.f64();
  batch.source_fingerprint = r.fixed(16);
  const auto count = r.u32();
  const auto rows = static_cast<int>(r.u32());
  const auto cols = static_cast<int>(r.u32());
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto label = static_cast<int>(r.u32());
    Image o(PixelGrid(rows, cols), label);
    Image a(PixelGrid(rows, cols), label);
    r.f64s(o.pixels.values);
    r.f64s(a.pixels.values);
    batch.originals.push_back(std::move(o));
    batch.adversarials.push_back(std::move(a));
  }
  if (!r.at_end()) throw DataError(where + ": trailing bytes");
  return batch;
}

}  // namespace robqunn
