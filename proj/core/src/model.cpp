#include "robqunn/model.hpp"

#include <algorithm>

#include "robqunn/binary_io.hpp"
#include "robqunn/errors.hpp"
#include "robqunn/quanv.hpp"

namespace robqunn {

namespace {

constexpr std::string_view kCheckpointMagic = "RQNNCKPT";
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr int kAnsatzQubits = 4;

}  // namespace

int Classifier::predict(const Image& image) const {
  const auto p = probabilities(image);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::string Extractor::model_name() const {
  return is_quantum() ? "QuNN-" + std::string(to_string(ansatz().kind())) : "CNN";
}

std::string Extractor::fingerprint() const {
  return is_quantum() ? ansatz().fingerprint() : conv().fingerprint();
}

std::uint64_t Extractor::seed() const { return is_quantum() ? ansatz().seed() : conv().seed; }

FeatureMap Extractor::forward(const Image& image) const {
  return is_quantum() ? quanv_forward(image, ansatz()) : conv_forward(image, conv());
}

ImageGradient Extractor::input_gradient(const Image& image, const FeatureMap& upstream,
                                        const FeatureMap& activations) const {
  return is_quantum() ? quanv_input_gradient(image, ansatz(), upstream)
                      : conv_input_gradient(conv(), upstream, activations);
}

std::vector<double> Model::probabilities(const Image& image) const {
  return dense_forward(extractor_.forward(image).data(), head_);
}

InputGradient Model::loss_gradient(const Image& image, int label) const {
  const auto features = extractor_.forward(image);
  const auto probs = dense_forward(features.data(), head_);
  auto lg = loss_and_grads(probs, label, features.data(), head_);
  FeatureMap upstream(features.height(), features.width(), features.channels());
  upstream.data() = std::move(lg.features);
  return {lg.loss, extractor_.input_gradient(image, upstream, features)};
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
  const auto& ex = model.extractor();
  io::Writer w;
  w.bytes(kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.u32(ex.is_quantum() ? 1U + static_cast<std::uint32_t>(ex.ansatz().kind()) : 0U);
  w.u64(ex.seed());
  w.fixed(ex.fingerprint(), 16);
  w.u32(DenseHead::kOutputs);
  w.u32(DenseHead::kInputs);
  w.f64s(model.head().weights);
  w.f64s(model.head().bias);
  w.save(path);
}

Model load_checkpoint(const std::filesystem::path& path) {
  auto r = io::Reader::open(path);
  const std::string where = "checkpoint " + path.string();
  if (r.bytes(kCheckpointMagic.size()) != kCheckpointMagic) throw DataError(where + ": bad magic");
  if (r.u32() != kCheckpointVersion) throw DataError(where + ": unsupported version");
  const auto code = r.u32();
  const auto seed = r.u64();
  const auto fingerprint = r.fixed(16);
  if (code > kAllAnsatzKinds.size()) throw DataError(where + ": unknown extractor code");
  Extractor ex = code == 0 ? Extractor(ConvLayer::random(seed))
                           : Extractor(build_ansatz(kAllAnsatzKinds[code - 1], kAnsatzQubits, seed));
  if (ex.fingerprint() != fingerprint) {
    throw DataError(where + ": extractor fingerprint mismatch (" + fingerprint + " vs " +
                    ex.fingerprint() + ")");
  }
  if (r.u32() != DenseHead::kOutputs || r.u32() != DenseHead::kInputs) {
    throw DataError(where + ": unexpected head shape");
  }
  DenseHead head;
  r.f64s(head.weights);
  r.f64s(head.bias);
  if (!r.at_end()) throw DataError(where + ": trailing bytes");
  return Model(std::move(ex), std::move(head));
}

}  // namespace robqunn
