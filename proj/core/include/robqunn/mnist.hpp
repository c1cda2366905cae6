#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "robqunn/errors.hpp"
#include "robqunn/hash.hpp"
#include "robqunn/tensor.hpp"

namespace robqunn::mnist {

enum class Split { Train, Test };
std::string_view to_string(Split split);

struct Dataset {
  std::vector<Image> images;
  Split split = Split::Train;
  Digest checksum{};  // SHA-256 over the decoded image bytes then label bytes

  std::size_t size() const { return images.size(); }
};

/// Distinct failure modes of IDX parsing.
class IdxError : public DataError {
 public:
  enum class Kind { Io, BadMagic, Truncated, CountMismatch, BadLabel };
  IdxError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint32_t kImagesMagic = 0x00000803;
inline constexpr std::uint32_t kLabelsMagic = 0x00000801;

/// Reads an IDX image/label pair (raw or gzip-compressed). Pixels are divided
/// by 255. Throws IdxError.
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                 Split split);

/// $ROBQUNN_DATA_DIR if set, else the directory configured at build time.
std::filesystem::path default_data_dir();

/// Loads {train,t10k}-{images-idx3,labels-idx1}-ubyte[.gz] from `dir`.
Dataset load_split(const std::filesystem::path& dir, Split split);

/// Deterministic selection of `count` images, kept in dataset order.
/// Stratified mode draws floor(count/10) per class and hands the remainder to
/// the lowest classes, giving per-class counts equal within one. Throws
/// std::invalid_argument if count exceeds the dataset (or a class runs short).
Dataset subset(const Dataset& dataset, std::size_t count, std::uint64_t seed, bool stratified);

/// SHA-256 of the normalized pixels (f64 LE) and labels (u32 LE) of every image.
Digest tensor_digest(const Dataset& dataset);

}  // namespace robqunn::mnist
