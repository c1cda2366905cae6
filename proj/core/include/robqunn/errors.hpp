#pragma once

#include <stdexcept>
#include <string>

namespace robqunn {

/// Malformed configuration, flags, or experiment settings.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problems with input files: datasets, checkpoints, caches, adversarial batches.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace robqunn
