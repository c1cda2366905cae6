#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "robqunn/attacks.hpp"
#include "robqunn/circuit_metrics.hpp"
#include "robqunn/harness.hpp"

namespace robqunn::report {

// CSV schemas. Reals are written with 17 significant digits so a read-back
// reproduces the exact doubles.
//   curve:     epsilon,accuracy
//   transfer:  source,target,epsilon,accuracy
//   metrics:   kind,seed,meyer_wallach,expressibility_kl,samples
//   history:   epoch,loss,accuracy
//   clean:     model,fingerprint,accuracy

std::string curve_csv(const RobustnessCurve& curve);
std::vector<std::pair<double, double>> parse_curve_csv(std::string_view text);

std::string transfer_csv(const std::vector<TransferRow>& rows);
std::vector<TransferRow> parse_transfer_csv(std::string_view text);

std::string metrics_csv(const std::vector<metrics::MetricReport>& reports);
std::string history_csv(const std::vector<EpochStats>& history);

std::string curve_file_name(const std::string& model, AttackKind attack);

/// Writes manifest.json: config, derived seeds, dataset digests, model
/// fingerprints, software version, and the SHA-256 of every output file
/// under the directory (relative paths, sorted; cache/ excluded).
void write_manifest(const ExperimentConfig& config, const DeskData& data,
                    const std::vector<Model>& models, const std::filesystem::path& out_dir);

std::string read_text(const std::filesystem::path& path);

}  // namespace robqunn::report
