#pragma once

#include <cstddef>
#include <vector>

namespace robqunn {

inline constexpr int kImageSide = 28;
inline constexpr int kNumClasses = 10;

/// Row-major real grid: images, image-shaped gradients.
struct PixelGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  PixelGrid() = default;
  PixelGrid(int r, int c, double fill = 0.0)
      : rows(r), cols(c), values(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

  double& operator()(int r, int c) { return values[static_cast<std::size_t>(r * cols + c)]; }
  double operator()(int r, int c) const { return values[static_cast<std::size_t>(r * cols + c)]; }
  std::size_t size() const { return values.size(); }
  bool same_shape(const PixelGrid& o) const { return rows == o.rows && cols == o.cols; }
  bool operator==(const PixelGrid&) const = default;
};

/// Normalized grayscale image, pixels in [0, 1].
struct Image {
  PixelGrid pixels;
  int label = -1;

  Image() = default;
  Image(PixelGrid p, int l) : pixels(std::move(p)), label(l) {}

  int rows() const { return pixels.rows; }
  int cols() const { return pixels.cols; }
  bool operator==(const Image&) const = default;
};

using ImageGradient = PixelGrid;

/// H x W x C tensor stored HWC, so data() is the flattened dense-layer input.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int height, int width, int channels, double fill = 0.0)
      : height_(height), width_(width), channels_(channels),
        data_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
                  static_cast<std::size_t>(channels),
              fill) {}

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const FeatureMap& o) const {
    return height_ == o.height_ && width_ == o.width_ && channels_ == o.channels_;
  }
  bool operator==(const FeatureMap&) const = default;

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(k);
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

}  // namespace robqunn
