#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "robqunn/ansatz.hpp"
#include "robqunn/attacks.hpp"

namespace robqunn {

/// Every knob of an experiment. Defaults reproduce the reference protocol
/// (30 epochs, batch 4, lr 1e-3) at desk scale (500 train / 200 test).
struct ExperimentConfig {
  std::uint64_t seed = 20240611;
  std::vector<AnsatzKind> ansatze{kAllAnsatzKinds.begin(), kAllAnsatzKinds.end()};
  int epochs = 30;
  int batch_size = 4;
  double learning_rate = 0.001;
  std::vector<AttackKind> attacks{AttackKind::FGSM, AttackKind::PGD, AttackKind::MIM};
  std::vector<double> eps_grid{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  int attack_iterations = AttackSpec::kDefaultIterations;
  double step_ratio = AttackSpec::kDefaultStepRatio;
  double momentum = AttackSpec::kDefaultMomentum;
  std::size_t train_count = 500;
  std::size_t test_count = 200;
  bool stratified = true;
  int metric_samples = 1000;
  int metric_bins = 75;
  std::filesystem::path out_dir = "results";
  std::filesystem::path data_dir;  // empty: mnist::default_data_dir()

  /// Throws ConfigError.
  void validate() const;

  /// One spec per epsilon of eps_grid for the given attack kind.
  std::vector<AttackSpec> attack_grid(AttackKind kind) const;

  std::filesystem::path resolved_data_dir() const;

  /// Flat key = value text that parse_config reads back to the same config.
  std::string to_text() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Flag values; unset members leave the config untouched.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  std::vector<std::string> ansatze;  // empty: keep
  std::optional<std::string> attacks;
  std::optional<std::string> eps_grid;
  std::optional<std::size_t> train_count;
  std::optional<std::size_t> test_count;
  std::optional<std::filesystem::path> out_dir;
};

/// Applies `key = value` lines on top of `base`. '#' starts a comment.
/// Unknown keys, duplicate keys and malformed values throw ConfigError.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Flag > config file > built-in default.
void apply_overrides(ExperimentConfig& config, const ConfigOverrides& overrides);

std::vector<double> parse_double_list(std::string_view text);

}  // namespace robqunn
