#include "robqunn/mnist.hpp"

#include <fmt/format.h>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstdlib>

#include "robqunn/rng.hpp"

namespace robqunn::mnist {

namespace {

#ifndef ROBQUNN_DEFAULT_DATA_DIR
#define ROBQUNN_DEFAULT_DATA_DIR "data"
#endif

/// Whole file through zlib, which passes uncompressed input through unchanged.
std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (f == nullptr) throw IdxError(IdxError::Kind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> out;
  std::array<std::uint8_t, 1 << 16> buf{};
  int n = 0;
  while ((n = gzread(f, buf.data(), static_cast<unsigned>(buf.size()))) > 0) {
    out.insert(out.end(), buf.begin(), buf.begin() + n);
  }
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw IdxError(IdxError::Kind::Truncated, "corrupt or truncated gzip stream in " + path.string());
  return out;
}

std::uint32_t be32(const std::vector<std::uint8_t>& d, std::size_t offset) {
  return (std::uint32_t{d[offset]} << 24) | (std::uint32_t{d[offset + 1]} << 16) |
         (std::uint32_t{d[offset + 2]} << 8) | std::uint32_t{d[offset + 3]};
}

void need(const std::vector<std::uint8_t>& d, std::size_t bytes, const std::filesystem::path& path) {
  if (d.size() < bytes) {
    throw IdxError(IdxError::Kind::Truncated,
                   fmt::format("{} is truncated: {} bytes, expected at least {}", path.string(),
                               d.size(), bytes));
  }
}

std::filesystem::path find_file(const std::filesystem::path& dir, const std::string& stem) {
  const auto raw = dir / stem;
  if (std::filesystem::exists(raw)) return raw;
  const auto gz = dir / (stem + ".gz");
  if (std::filesystem::exists(gz)) return gz;
  throw IdxError(IdxError::Kind::Io, fmt::format("no {} or {}.gz in {}", stem, stem, dir.string()));
}

}  // namespace

std::string_view to_string(Split split) { return split == Split::Train ? "train" : "test"; }

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                 Split split) {
  const auto images = read_maybe_gzip(images_path);
  const auto labels = read_maybe_gzip(labels_path);

  need(images, 16, images_path);
  if (be32(images, 0) != kImagesMagic) {
    throw IdxError(IdxError::Kind::BadMagic,
                   fmt::format("{}: bad magic 0x{:08x}", images_path.string(), be32(images, 0)));
  }
  need(labels, 8, labels_path);
  if (be32(labels, 0) != kLabelsMagic) {
    throw IdxError(IdxError::Kind::BadMagic,
                   fmt::format("{}: bad magic 0x{:08x}", labels_path.string(), be32(labels, 0)));
  }
  const std::size_t count = be32(images, 4);
  const int rows = static_cast<int>(be32(images, 8));
  const int cols = static_cast<int>(be32(images, 12));
  const std::size_t label_count = be32(labels, 4);
  if (count != label_count) {
    throw IdxError(IdxError::Kind::CountMismatch,
                   fmt::format("{} holds {} images but {} holds {} labels", images_path.string(),
                               count, labels_path.string(), label_count));
  }
  const std::size_t pixels = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  need(images, 16 + count * pixels, images_path);
  need(labels, 8 + count, labels_path);

  Dataset ds;
  ds.split = split;
  ds.images.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const int label = labels[8 + n];
    if (label > 9) {
      throw IdxError(IdxError::Kind::BadLabel, fmt::format("{}: label {} out of range at index {}",
                                                           labels_path.string(), label, n));
    }
    PixelGrid grid(rows, cols);
    const std::uint8_t* src = images.data() + 16 + n * pixels;
    for (std::size_t p = 0; p < pixels; ++p) grid.values[p] = src[p] / 255.0;
    ds.images.emplace_back(std::move(grid), label);
  }
  Sha256 h;
  h.update(std::span(images).subspan(16, count * pixels));
  h.update(std::span(labels).subspan(8, count));
  ds.checksum = h.finish();
  return ds;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("ROBQUNN_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return ROBQUNN_DEFAULT_DATA_DIR;
}

Dataset load_split(const std::filesystem::path& dir, Split split) {
  const std::string prefix = split == Split::Train ? "train" : "t10k";
  return load_idx(find_file(dir, prefix + "-images-idx3-ubyte"),
                  find_file(dir, prefix + "-labels-idx1-ubyte"), split);
}

Dataset subset(const Dataset& dataset, std::size_t count, std::uint64_t seed, bool stratified) {
  if (count > dataset.size()) {
    throw std::invalid_argument(
        fmt::format("subset of {} requested from a dataset of {}", count, dataset.size()));
  }
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  if (stratified) {
    std::array<std::vector<std::size_t>, kNumClasses> by_class;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      by_class[static_cast<std::size_t>(dataset.images[i].label)].push_back(i);
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      const std::size_t want = count / kNumClasses + (c < count % kNumClasses ? 1 : 0);
      auto& pool = by_class[c];
      if (pool.size() < want) {
        throw std::invalid_argument(
            fmt::format("class {} has {} images, {} requested", c, pool.size(), want));
      }
      shuffle(std::span(pool), rng);
      chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
    }
  } else {
    std::vector<std::size_t> all(dataset.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    shuffle(std::span(all), rng);
    chosen.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
  }
  std::sort(chosen.begin(), chosen.end());

  Dataset out;
  out.split = dataset.split;
  out.checksum = dataset.checksum;
  out.images.reserve(chosen.size());
  for (auto i : chosen) out.images.push_back(dataset.images[i]);
  return out;
}

Digest tensor_digest(const Dataset& dataset) {
  Sha256 h;
  for (const auto& img : dataset.images) {
    h.update_doubles(img.pixels.values);
    const auto label = static_cast<std::uint32_t>(img.label);
    const std::array<std::uint8_t, 4> bytes{static_cast<std::uint8_t>(label), static_cast<std::uint8_t>(label >> 8),
                                            static_cast<std::uint8_t>(label >> 16),
                                            static_cast<std::uint8_t>(label >> 24)};
    h.update(bytes);
  }
  return h.finish();
}

}  // namespace robqunn::mnist
