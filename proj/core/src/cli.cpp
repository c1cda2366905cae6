#include "robqunn/cli.hpp"

#include <CLI11.hpp>

#include <functional>
#include <map>
#include <ostream>

#include "robqunn/config.hpp"
#include "robqunn/errors.hpp"
#include "robqunn/harness.hpp"

namespace robqunn::cli {

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robustness of quanvolutional and classical networks under adversarial attacks"};
  app.name("robqunn");
  app.require_subcommand(1, 1);

  std::string config_path;
  ConfigOverrides overrides;
  std::uint64_t seed = 0;
  int epochs = 0;
  int batch_size = 0;
  double lr = 0.0;
  std::string attacks;
  std::string eps_grid;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::string out_dir;

  auto* opt_seed = app.add_option("--seed", seed, "Master seed");
  auto* opt_epochs = app.add_option("--epochs", epochs, "Training epochs (default 30)");
  auto* opt_batch = app.add_option("--batch-size", batch_size, "Minibatch size (default 4)");
  auto* opt_lr = app.add_option("--lr", lr, "Adam learning rate (default 0.001)");
  app.add_option("--config", config_path, "Flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--ansatz", overrides.ansatze,
                 "Ansatz kind (NoEnt, ZZFull, ZZLinear, ZZStar, Random); repeatable")
      ->take_all();
  auto* opt_attack = app.add_option("--attack", attacks, "Comma list of FGSM, PGD, MIM");
  auto* opt_eps = app.add_option("--eps-grid", eps_grid, "Comma list of epsilons starting at 0");
  auto* opt_train = app.add_option("--train-count", train_count, "Training subset size");
  auto* opt_test = app.add_option("--test-count", test_count, "Test subset size");
  auto* opt_out = app.add_option("--out", out_dir, "Output directory");
  app.footer(
      "Data: MNIST IDX files are read from $ROBQUNN_DATA_DIR (default: the bundled data/ "
      "directory).\nPrecedence: flag > config file > built-in default.");

  using Stage = std::function<void(const ExperimentConfig&, std::ostream&)>;
  const std::vector<std::tuple<std::string, std::string, Stage>> commands{
      {"train", "Train the dense heads of the CNN and every QuNN", stage_train},
      {"attack", "White-box FGSM/PGD/MIM robustness curves", stage_whitebox},
      {"transfer", "Cross-model FGSM transferability matrix", stage_transfer},
      {"metrics", "Entanglement and expressibility of each ansatz", stage_metrics},
      {"report", "Write the manifest for an output directory", stage_report},
      {"all", "train, attack, transfer, metrics, report", stage_all},
  };
  for (const auto& [name, help, stage] : commands) {
    app.add_subcommand(name, help)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "robqunn: " << e.what() << "\n" << "Run with --help for usage.\n";
    return kUsage;
  }

  if (*opt_seed) overrides.seed = seed;
  if (*opt_epochs) overrides.epochs = epochs;
  if (*opt_batch) overrides.batch_size = batch_size;
  if (*opt_lr) overrides.learning_rate = lr;
  if (*opt_attack) overrides.attacks = attacks;
  if (*opt_eps) overrides.eps_grid = eps_grid;
  if (*opt_train) overrides.train_count = train_count;
  if (*opt_test) overrides.test_count = test_count;
  if (*opt_out) overrides.out_dir = out_dir;

  try {
    ExperimentConfig config = config_path.empty() ? ExperimentConfig{} : load_config_file(config_path);
    apply_overrides(config, overrides);
    config.validate();
    for (const auto& [name, help, stage] : commands) {
      if (app.got_subcommand(name)) stage(config, out);
    }
  } catch (const ConfigError& e) {
    err << "robqunn: config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DataError& e) {
    err << "robqunn: data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "robqunn: error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}

}  // namespace robqunn::cli
