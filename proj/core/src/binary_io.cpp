#include "robqunn/binary_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "robqunn/errors.hpp"

namespace robqunn::io {

void Writer::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void Writer::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void Writer::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void Writer::f64s(std::span<const double> values) {
  buf_.reserve(buf_.size() + 8 * values.size());
  for (double v : values) f64(v);
}

void Writer::bytes(std::string_view raw) { buf_.insert(buf_.end(), raw.begin(), raw.end()); }

void Writer::fixed(std::string_view text, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) {
    buf_.push_back(i < text.size() ? static_cast<std::uint8_t>(text[i]) : 0);
  }
}

void Writer::save(const std::filesystem::path& path) const { write_file(path, buf_); }

Reader::Reader(std::vector<std::uint8_t> data, std::string what)
    : data_(std::move(data)), what_(std::move(what)) {}

Reader Reader::open(const std::filesystem::path& path) {
  return Reader(read_file(path), path.string());
}

void Reader::need(std::size_t n) const {
  if (data_.size() - pos_ < n) {
    throw DataError("truncated " + what_ + ": needed " + std::to_string(n) + " bytes at offset " +
                    std::to_string(pos_) + ", have " + std::to_string(data_.size() - pos_));
  }
}

std::uint32_t Reader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t Reader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

double Reader::f64() { return std::bit_cast<double>(u64()); }

void Reader::f64s(std::span<double> out) {
  need(8 * out.size());
  for (auto& v : out) v = f64();
}

std::string Reader::bytes(std::size_t n) {
  need(n);
  std::string out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
  pos_ += n;
  return out;
}

std::string Reader::fixed(std::size_t width) {
  auto s = bytes(width);
  s.erase(s.find_last_not_of('\0') + 1);
  return s;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace robqunn::io
