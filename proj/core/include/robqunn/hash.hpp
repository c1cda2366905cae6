#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace robqunn {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> bytes);
Digest sha256(std::string_view text);
std::string to_hex(std::span<const std::uint8_t> bytes);

/// 16 hex characters of SHA-256; identifies frozen extractors and models.
std::string short_fingerprint(std::string_view text);

/// Incremental SHA-256 for large payloads.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::span<const std::uint8_t> bytes);
  void update_doubles(std::span<const double> values);  // little-endian bytes
  Digest finish();

 private:
  void* ctx_;
};

}  // namespace robqunn
