#include "robqunn/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "robqunn/binary_io.hpp"
#include "robqunn/errors.hpp"
#include "robqunn/hash.hpp"

#ifndef ROBQUNN_VERSION
#define ROBQUNN_VERSION "0.0.0"
#endif

namespace robqunn::report {

namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> parse_rows(std::string_view text, std::size_t columns,
                                                 std::string_view header) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw DataError(fmt::format("csv: expected header '{}'", header));
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns) throw DataError("csv: wrong column count in '" + line + "'");
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::string real(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

std::string curve_csv(const RobustnessCurve& curve) {
  std::string out = "epsilon,accuracy\n";
  for (const auto& [eps, acc] : curve.points) out += real(eps) + "," + real(acc) + "\n";
  return out;
}

std::vector<std::pair<double, double>> parse_curve_csv(std::string_view text) {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : parse_rows(text, 2, "epsilon,accuracy")) {
    out.emplace_back(std::stod(r[0]), std::stod(r[1]));
  }
  return out;
}

std::string transfer_csv(const std::vector<TransferRow>& rows) {
  std::string out = "source,target,epsilon,accuracy\n";
  for (const auto& r : rows) out += fmt::format("{},{},{},{}\n", r.source, r.target, real(r.epsilon), real(r.accuracy));
  return out;
}

std::vector<TransferRow> parse_transfer_csv(std::string_view text) {
  std::vector<TransferRow> out;
  for (const auto& r : parse_rows(text, 4, "source,target,epsilon,accuracy")) {
    out.push_back({r[0], r[1], std::stod(r[2]), std::stod(r[3])});
  }
  return out;
}

std::string metrics_csv(const std::vector<metrics::MetricReport>& reports) {
  std::string out = "kind,seed,meyer_wallach,expressibility_kl,samples\n";
  for (const auto& r : reports) {
    out += fmt::format("{},{},{},{},{}\n", to_string(r.kind), r.seed, real(r.meyer_wallach),
                       real(r.expressibility_kl), r.samples);
  }
  return out;
}

std::string history_csv(const std::vector<EpochStats>& history) {
  std::string out = "epoch,loss,accuracy\n";
  for (const auto& e : history) out += fmt::format("{},{},{}\n", e.epoch, real(e.loss), real(e.accuracy));
  return out;
}

std::string curve_file_name(const std::string& model, AttackKind attack) {
  return fmt::format("{}_{}.csv", model, to_string(attack));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_manifest(const ExperimentConfig& config, const DeskData& data,
                    const std::vector<Model>& models, const fs::path& out_dir) {
  using nlohmann::ordered_json;
  ordered_json m;
  m["software"] = {{"name", "robqunn"}, {"version", ROBQUNN_VERSION}};

  ordered_json cfg;
  cfg["seed"] = config.seed;
  cfg["ansatz"] = ordered_json::array();
  for (auto k : config.ansatze) cfg["ansatz"].push_back(std::string(to_string(k)));
  cfg["epochs"] = config.epochs;
  cfg["batch_size"] = config.batch_size;
  cfg["learning_rate"] = config.learning_rate;
  cfg["attack"] = ordered_json::array();
  for (auto k : config.attacks) cfg["attack"].push_back(std::string(to_string(k)));
  cfg["eps_grid"] = config.eps_grid;
  cfg["attack_iterations"] = config.attack_iterations;
  cfg["step_ratio"] = config.step_ratio;
  cfg["momentum"] = config.momentum;
  cfg["train_count"] = config.train_count;
  cfg["test_count"] = config.test_count;
  cfg["stratified"] = config.stratified;
  cfg["metric_samples"] = config.metric_samples;
  cfg["metric_bins"] = config.metric_bins;
  cfg["data_dir"] = config.resolved_data_dir().string();
  m["config"] = cfg;

  ordered_json seeds = ordered_json::object();
  for (const auto& [tag, seed] : seed_plan(config)) seeds[tag] = seed;
  m["seeds"] = seeds;

  auto dataset_entry = [](const mnist::Dataset& ds) {
    return ordered_json{{"count", ds.size()},
                        {"source_sha256", to_hex(ds.checksum)},
                        {"tensor_sha256", to_hex(mnist::tensor_digest(ds))}};
  };
  m["datasets"] = {{"train", dataset_entry(data.train)}, {"test", dataset_entry(data.test)}};

  m["models"] = ordered_json::array();
  for (const auto& model : models) {
    m["models"].push_back({{"name", model.name()},
                           {"extractor_fingerprint", model.fingerprint()},
                           {"extractor_seed", model.extractor().seed()}});
  }

  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), out_dir).generic_string();
    if (rel == "manifest.json" || rel.starts_with("cache/")) continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  ordered_json outputs = ordered_json::array();
  for (const auto& rel : files) {
    outputs.push_back({{"path", rel}, {"sha256", to_hex(sha256(io::read_file(out_dir / rel)))}});
  }
  m["outputs"] = outputs;

  io::write_text(out_dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace robqunn::report
