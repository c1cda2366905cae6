#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace robqunn::io {

// Little-endian binary encoding shared by checkpoints, feature caches, and
// adversarial batches.

class Writer {
 public:
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void f64s(std::span<const double> values);
  void bytes(std::string_view raw);
  void fixed(std::string_view text, std::size_t width);  // zero padded

  const std::vector<std::uint8_t>& buffer() const { return buf_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::uint8_t> buf_;
};

/// Throws DataError("truncated ...") on short reads.
class Reader {
 public:
  explicit Reader(std::vector<std::uint8_t> data, std::string what = "file");
  static Reader open(const std::filesystem::path& path);

  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  void f64s(std::span<double> out);
  std::string bytes(std::size_t n);
  std::string fixed(std::size_t width);  // strips zero padding

  bool at_end() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const;

  std::vector<std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::string what_;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace robqunn::io
