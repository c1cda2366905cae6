#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "robqunn/attacks.hpp"
#include "robqunn/circuit_metrics.hpp"
#include "robqunn/config.hpp"
#include "robqunn/mnist.hpp"
#include "robqunn/model.hpp"

namespace robqunn {

// Seed splitting: every random quantity is seeded with
// derive_seed(config.seed, tag) using the tags below.
//   subset/train, subset/test            dataset subsets
//   conv                                 CNN kernels
//   ansatz/<Kind>                        quanvolutional filter angles
//   head/<Model>, shuffle/<Model>        head init and minibatch order
//   metrics/meyer-wallach/<Kind>         entanglement sampling
//   metrics/expressibility/<Kind>        fidelity sampling
std::vector<std::pair<std::string, std::uint64_t>> seed_plan(const ExperimentConfig& config);
std::uint64_t config_seed(const ExperimentConfig& config, const std::string& tag);

inline constexpr int kQuanvQubits = 4;

struct DeskData {
  mnist::Dataset train;
  mnist::Dataset test;
};

/// Loads the configured data directory and draws the seeded subsets.
DeskData load_desk_data(const ExperimentConfig& config);

/// CNN first, then one QuNN per configured ansatz kind.
std::vector<Extractor> build_extractors(const ExperimentConfig& config);

/// Forward features for every image, read from / written to `cache_file`
/// when it is non-empty.
std::vector<FeatureMap> extract_features(const Extractor& extractor, std::span<const Image> images,
                                         const std::filesystem::path& cache_file = {});

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;      // mean example loss seen during the epoch
  double accuracy = 0.0;  // fraction predicted correctly during the epoch
};

struct TrainingResult {
  Model model;
  std::vector<EpochStats> history;
};

/// Adam on the dense head over precomputed features; seeded shuffling per
/// epoch, gradients averaged over each minibatch. Throws std::runtime_error
/// on a non-finite loss.
TrainingResult train_head(const Extractor& extractor, std::span<const FeatureMap> features,
                          std::span<const Image> images, const ExperimentConfig& config);

TrainingResult train_model(const Extractor& extractor, const mnist::Dataset& train,
                           const ExperimentConfig& config,
                           const std::filesystem::path& cache_file = {});

/// Per model, per configured attack kind: one curve over eps_grid.
std::vector<RobustnessCurve> run_whitebox_suite(std::span<const Model> models,
                                                std::span<const Image> test,
                                                const ExperimentConfig& config);

struct TransferRow {
  std::string source;
  std::string target;
  double epsilon = 0.0;
  double accuracy = 0.0;
  bool operator==(const TransferRow&) const = default;
};

/// FGSM examples from the CNN scored on every QuNN, then from every QuNN
/// scored on the CNN, at each epsilon. When `batch_dir` is non-empty the
/// generated batches are written there.
std::vector<TransferRow> run_transfer_suite(std::span<const Model> models,
                                            std::span<const Image> test,
                                            const ExperimentConfig& config,
                                            const std::filesystem::path& batch_dir = {});

std::vector<metrics::MetricReport> run_metrics(const ExperimentConfig& config);

// Pipeline stages. Each reads its inputs from and writes its outputs under
// config.out_dir, so they can run independently once `train` has run.
//   train     models/<Model>.ckpt, train/<Model>_history.csv, train/clean_accuracy.csv
//   whitebox  whitebox/<Model>_<Attack>.csv
//   transfer  transfer/transfer_matrix.csv, adversarial/<Model>_FGSM_<i>.bin
//   metrics   metrics/circuit_metrics.csv
//   report    manifest.json
void stage_train(const ExperimentConfig& config, std::ostream& log);
void stage_whitebox(const ExperimentConfig& config, std::ostream& log);
void stage_transfer(const ExperimentConfig& config, std::ostream& log);
void stage_metrics(const ExperimentConfig& config, std::ostream& log);
void stage_report(const ExperimentConfig& config, std::ostream& log);
void stage_all(const ExperimentConfig& config, std::ostream& log);

/// Loads models/<name>.ckpt for every configured model. Throws DataError
/// naming the missing checkpoint.
std::vector<Model> load_trained_models(const ExperimentConfig& config);

}  // namespace robqunn
