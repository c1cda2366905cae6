#include "robqunn/quanv.hpp"

#include <fmt/format.h>

#include <numbers>
#include <stdexcept>

#include "robqunn/binary_io.hpp"
#include "robqunn/errors.hpp"

namespace robqunn {

namespace {

constexpr int kKernel = 2;
constexpr int kStride = 2;
constexpr int kQubits = kKernel * kKernel;
constexpr std::size_t kFingerprintWidth = 16;

void check_pixel(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(fmt::format("pixel value {} outside [0, 1]", v));
  }
}

void check_ansatz(const Ansatz& ansatz) {
  if (ansatz.n_qubits() != kQubits) {
    throw std::invalid_argument(
        fmt::format("quanvolution needs a {}-qubit ansatz, got {}", kQubits, ansatz.n_qubits()));
  }
}

/// Encoding gates followed by the ansatz gates.
std::vector<qsim::Gate> patch_program(const Patch& patch, const Ansatz& ansatz) {
  auto program = encoding_gates(patch.values);
  program.insert(program.end(), ansatz.gates().begin(), ansatz.gates().end());
  return program;
}

}  // namespace

std::vector<Patch> extract_patches(const Image& image, int n, int stride) {
  const int rows = image.rows();
  const int cols = image.cols();
  if (n < 1 || stride < 1 || rows < n || cols < n || (rows - n) % stride != 0 ||
      (cols - n) % stride != 0) {
    throw std::invalid_argument(fmt::format(
        "cannot tile a {}x{} image with {}x{} patches at stride {}", rows, cols, n, n, stride));
  }
  std::vector<Patch> patches;
  patches.reserve(static_cast<std::size_t>(((rows - n) / stride + 1) * ((cols - n) / stride + 1)));
  for (int i = 0; i + n <= rows; i += stride) {
    for (int j = 0; j + n <= cols; j += stride) {
      Patch p;
      p.row = i;
      p.col = j;
      p.values.reserve(static_cast<std::size_t>(n * n));
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) p.values.push_back(image.pixels(i + k, j + l));
      }
      patches.push_back(std::move(p));
    }
  }
  return patches;
}

std::vector<qsim::Gate> encoding_gates(std::span<const double> values) {
  std::vector<qsim::Gate> gates;
  gates.reserve(values.size());
  for (std::size_t q = 0; q < values.size(); ++q) {
    check_pixel(values[q]);
    gates.push_back(qsim::Gate::ry(static_cast<int>(q), std::numbers::pi * values[q]));
  }
  return gates;
}

qsim::StateVector encode_patch(const Patch& patch) {
  const auto gates = encoding_gates(patch.values);
  return qsim::run_program(qsim::init_zero(static_cast<int>(patch.values.size())), gates);
}

FeatureMap quanv_forward(const Image& image, const Ansatz& ansatz) {
  check_ansatz(ansatz);
  const auto patches = extract_patches(image, kKernel, kStride);
  FeatureMap out((image.rows() - kKernel) / kStride + 1, (image.cols() - kKernel) / kStride + 1,
                 kQubits);
  const auto zero = qsim::init_zero(kQubits);
  for (const auto& patch : patches) {
    const auto z = qsim::measure_all_z(qsim::run_program(zero, patch_program(patch, ansatz)));
    for (int k = 0; k < kQubits; ++k) {
      out(patch.row / kStride, patch.col / kStride, k) = z[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

ImageGradient quanv_input_gradient(const Image& image, const Ansatz& ansatz,
                                   const FeatureMap& upstream) {
  check_ansatz(ansatz);
  const int out_rows = (image.rows() - kKernel) / kStride + 1;
  const int out_cols = (image.cols() - kKernel) / kStride + 1;
  if (upstream.height() != out_rows || upstream.width() != out_cols ||
      upstream.channels() != kQubits) {
    throw std::invalid_argument(fmt::format("upstream gradient shape {}x{}x{} != {}x{}x{}",
                                            upstream.height(), upstream.width(),
                                            upstream.channels(), out_rows, out_cols, kQubits));
  }
  ImageGradient grad(image.rows(), image.cols());
  const auto zero = qsim::init_zero(kQubits);
  for (const auto& patch : extract_patches(image, kKernel, kStride)) {
    const int i = patch.row / kStride;
    const int j = patch.col / kStride;
    bool any = false;
    for (int k = 0; k < kQubits; ++k) any = any || upstream(i, j, k) != 0.0;
    if (!any) continue;
    const auto program = patch_program(patch, ansatz);
    for (int q = 0; q < kQubits; ++q) {
      // Encoding gate q sits at program index q; d(angle)/d(pixel) = pi.
      const auto dz = qsim::shift_derivative_all(zero, program, static_cast<std::size_t>(q), 0);
      double g = 0.0;
      for (int k = 0; k < kQubits; ++k) g += upstream(i, j, k) * dz[static_cast<std::size_t>(k)];
      grad(patch.row + q / kKernel, patch.col + q % kKernel) = std::numbers::pi * g;
    }
  }
  return grad;
}

void write_feature_cache(const std::filesystem::path& path, const std::string& fingerprint,
                         std::span<const FeatureMap> features) {
  io::Writer w;
  for (std::size_t idx = 0; idx < features.size(); ++idx) {
    w.u32(static_cast<std::uint32_t>(idx));
    w.fixed(fingerprint, kFingerprintWidth);
    w.f64s(features[idx].data());
  }
  w.save(path);
}

std::optional<std::vector<FeatureMap>> read_feature_cache(const std::filesystem::path& path,
                                                          const std::string& fingerprint,
                                                          std::size_t expected_count) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  auto reader = io::Reader::open(path);
  constexpr int kSide = kImageSide / kStride;
  std::vector<FeatureMap> out;
  while (!reader.at_end()) {
    const auto index = reader.u32();
    if (index != out.size()) throw DataError("feature cache " + path.string() + ": records out of order");
    if (reader.fixed(kFingerprintWidth) != fingerprint) return std::nullopt;
    FeatureMap fm(kSide, kSide, kQubits);
    reader.f64s(fm.data());
    out.push_back(std::move(fm));
  }
  if (out.size() != expected_count) return std::nullopt;
  return out;
}

}  // namespace robqunn
