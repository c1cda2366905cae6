#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robqunn/ansatz.hpp"
#include "robqunn/qsim.hpp"
#include "robqunn/tensor.hpp"

namespace robqunn {

/// An n x n block of pixels, row-major, anchored at (row, col).
struct Patch {
  std::vector<double> values;
  int row = 0;
  int col = 0;
};

/// Patches in row-major scan order. Throws std::invalid_argument unless
/// (rows - n) and (cols - n) are non-negative multiples of stride.
std::vector<Patch> extract_patches(const Image& image, int n, int stride);

/// Ry(pi * value) on qubit q for each patch value q.
std::vector<qsim::Gate> encoding_gates(std::span<const double> values);

/// Product state of encoding_gates(values) applied to |0...0>.
/// Throws std::invalid_argument for values outside [0, 1].
qsim::StateVector encode_patch(const Patch& patch);

/// Quanvolutional layer with a 2x2 kernel and stride 2 on 4 qubits: channel k
/// of output pixel (i, j) is <Z_k> after the ansatz acts on the encoded patch
/// anchored at (2i, 2j). Patch position (r, c) feeds qubit 2r + c.
FeatureMap quanv_forward(const Image& image, const Ansatz& ansatz);

/// Exact gradient of sum(upstream * quanv_forward(image)) w.r.t. the pixels,
/// by parameter shift on the encoding rotations.
ImageGradient quanv_input_gradient(const Image& image, const Ansatz& ansatz,
                                   const FeatureMap& upstream);

/// On-disk cache of extractor outputs. One record per image:
///   u32 image index | 16-byte extractor fingerprint | feature values (f64 LE)
/// Values are the flattened 14x14x4 map (784 doubles).
void write_feature_cache(const std::filesystem::path& path, const std::string& fingerprint,
                         std::span<const FeatureMap> features);

/// Returns nullopt when the file is missing, was written by a different
/// extractor, or holds a different number of records. Throws DataError on a
/// structurally corrupt file.
std::optional<std::vector<FeatureMap>> read_feature_cache(const std::filesystem::path& path,
                                                          const std::string& fingerprint,
                                                          std::size_t expected_count);

}  // namespace robqunn
