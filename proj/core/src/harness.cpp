#include "robqunn/harness.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "robqunn/binary_io.hpp"
#include "robqunn/errors.hpp"
#include "robqunn/parallel.hpp"
#include "robqunn/quanv.hpp"
#include "robqunn/report.hpp"
#include "robqunn/rng.hpp"

namespace robqunn {

namespace fs = std::filesystem;

namespace {

std::string kind_name(AnsatzKind kind) { return std::string(to_string(kind)); }

std::string model_name_for(AnsatzKind kind) { return "QuNN-" + kind_name(kind); }

fs::path cache_path(const ExperimentConfig& config, const Extractor& ex, mnist::Split split) {
  return config.out_dir / "cache" /
         fmt::format("{}-{}-{}.bin", ex.model_name(), ex.fingerprint(), mnist::to_string(split));
}

fs::path checkpoint_path(const ExperimentConfig& config, const std::string& model_name) {
  return config.out_dir / "models" / (model_name + ".ckpt");
}

}  // namespace

std::uint64_t config_seed(const ExperimentConfig& config, const std::string& tag) {
  return derive_seed(config.seed, tag);
}

std::vector<std::pair<std::string, std::uint64_t>> seed_plan(const ExperimentConfig& config) {
  std::vector<std::string> tags{"subset/train", "subset/test", "conv"};
  for (auto k : config.ansatze) tags.push_back("ansatz/" + kind_name(k));
  std::vector<std::string> models{"CNN"};
  for (auto k : config.ansatze) models.push_back(model_name_for(k));
  for (const auto& m : models) {
    tags.push_back("head/" + m);
    tags.push_back("shuffle/" + m);
  }
  for (auto k : config.ansatze) {
    tags.push_back("metrics/meyer-wallach/" + kind_name(k));
    tags.push_back("metrics/expressibility/" + kind_name(k));
  }
  std::vector<std::pair<std::string, std::uint64_t>> plan;
  plan.emplace_back("master", config.seed);
  for (auto& t : tags) {
    const auto s = config_seed(config, t);
    plan.emplace_back(std::move(t), s);
  }
  return plan;
}

DeskData load_desk_data(const ExperimentConfig& config) {
  const auto dir = config.resolved_data_dir();
  const auto train = mnist::load_split(dir, mnist::Split::Train);
  const auto test = mnist::load_split(dir, mnist::Split::Test);
  return {mnist::subset(train, config.train_count, config_seed(config, "subset/train"), config.stratified),
          mnist::subset(test, config.test_count, config_seed(config, "subset/test"), config.stratified)};
}

std::vector<Extractor> build_extractors(const ExperimentConfig& config) {
  std::vector<Extractor> out;
  out.emplace_back(ConvLayer::random(config_seed(config, "conv")));
  for (auto k : config.ansatze) {
    out.emplace_back(build_ansatz(k, kQuanvQubits, config_seed(config, "ansatz/" + kind_name(k))));
  }
  return out;
}

std::vector<FeatureMap> extract_features(const Extractor& extractor, std::span<const Image> images,
                                         const fs::path& cache_file) {
  const auto fingerprint = extractor.fingerprint();
  if (!cache_file.empty()) {
    if (auto cached = read_feature_cache(cache_file, fingerprint, images.size())) return *cached;
  }
  std::vector<FeatureMap> features(images.size());
  parallel_for(images.size(), [&](std::size_t i) { features[i] = extractor.forward(images[i]); });
  if (!cache_file.empty()) write_feature_cache(cache_file, fingerprint, features);
  return features;
}

TrainingResult train_head(const Extractor& extractor, std::span<const FeatureMap> features,
                          std::span<const Image> images, const ExperimentConfig& config) {
  if (features.size() != images.size()) {
    throw std::invalid_argument("train_head: feature and image counts differ");
  }
  const auto name = extractor.model_name();
  const auto frozen = extractor.fingerprint();
  TrainingResult result{Model(extractor, DenseHead::random(config_seed(config, "head/" + name))), {}};
  DenseHead& head = result.model.head();
  AdamState adam;
  Rng rng(config_seed(config, "shuffle/" + name));

  std::vector<std::size_t> order(images.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(std::span(order), rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      HeadGradients grads;
      for (std::size_t b = start; b < end; ++b) {
        const auto idx = order[b];
        const auto& f = features[idx].data();
        const auto probs = dense_forward(f, head);
        const auto lg = loss_and_grads(probs, images[idx].label, f, head);
        if (!std::isfinite(lg.loss)) {
          throw std::runtime_error(fmt::format("{}: non-finite loss at epoch {} (example {})", name,
                                               epoch, idx));
        }
        loss_sum += lg.loss;
        const auto predicted = std::max_element(probs.begin(), probs.end()) - probs.begin();
        correct += predicted == images[idx].label;
        grads += lg.head;
      }
      grads *= 1.0 / static_cast<double>(end - start);
      adam_step(head, adam, grads, config.learning_rate);
    }
    const auto n = static_cast<double>(order.size());
    result.history.push_back({epoch, loss_sum / n, static_cast<double>(correct) / n});
  }
  if (result.model.extractor().fingerprint() != frozen) {
    throw std::logic_error(name + ": extractor changed during training");
  }
  return result;
}

TrainingResult train_model(const Extractor& extractor, const mnist::Dataset& train,
                           const ExperimentConfig& config, const fs::path& cache_file) {
  const auto features = extract_features(extractor, train.images, cache_file);
  return train_head(extractor, features, train.images, config);
}

std::vector<RobustnessCurve> run_whitebox_suite(std::span<const Model> models,
                                                std::span<const Image> test,
                                                const ExperimentConfig& config) {
  std::vector<RobustnessCurve> curves;
  for (const auto& model : models) {
    for (auto kind : config.attacks) {
      const auto grid = config.attack_grid(kind);
      curves.push_back(evaluate_robustness(model, model.name(), test, grid));
    }
  }
  return curves;
}

std::vector<TransferRow> run_transfer_suite(std::span<const Model> models,
                                            std::span<const Image> test,
                                            const ExperimentConfig& config,
                                            const fs::path& batch_dir) {
  const Model* cnn = nullptr;
  std::vector<const Model*> qunns;
  for (const auto& m : models) {
    if (m.extractor().is_quantum()) {
      qunns.push_back(&m);
    } else {
      cnn = &m;
    }
  }
  if (cnn == nullptr || qunns.empty()) {
    throw std::invalid_argument("transfer suite needs the CNN and at least one QuNN");
  }
  const auto grid = config.attack_grid(AttackKind::FGSM);
  auto make_batch = [&](const Model& source, std::size_t e) {
    auto batch = generate_batch(source, test, grid[e]);
    if (!batch_dir.empty()) {
      write_adversarial_batch(batch_dir / fmt::format("{}_FGSM_{}.bin", source.name(), e), batch);
    }
    return batch;
  };

  std::vector<TransferRow> rows;
  std::vector<AdversarialBatch> from_cnn;
  for (std::size_t e = 0; e < grid.size(); ++e) from_cnn.push_back(make_batch(*cnn, e));
  for (const auto* target : qunns) {
    for (std::size_t e = 0; e < grid.size(); ++e) {
      rows.push_back({cnn->name(), target->name(), grid[e].epsilon,
                      accuracy(*target, from_cnn[e].adversarials)});
    }
  }
  for (const auto* source : qunns) {
    for (std::size_t e = 0; e < grid.size(); ++e) {
      const auto batch = make_batch(*source, e);
      rows.push_back({source->name(), cnn->name(), grid[e].epsilon, accuracy(*cnn, batch.adversarials)});
    }
  }
  return rows;
}

std::vector<metrics::MetricReport> run_metrics(const ExperimentConfig& config) {
  std::vector<metrics::MetricReport> out;
  for (auto kind : config.ansatze) {
    const auto name = kind_name(kind);
    const auto ansatz = build_ansatz(kind, kQuanvQubits, config_seed(config, "ansatz/" + name));
    metrics::MetricReport r;
    r.kind = kind;
    r.fingerprint = ansatz.fingerprint();
    r.seed = ansatz.seed();
    r.samples = config.metric_samples;
    r.meyer_wallach = metrics::meyer_wallach(ansatz, config.metric_samples,
                                             config_seed(config, "metrics/meyer-wallach/" + name));
    r.expressibility_kl =
        metrics::expressibility_kl(kind, kQuanvQubits, config.metric_samples, config.metric_bins,
                                   config_seed(config, "metrics/expressibility/" + name));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Model> load_trained_models(const ExperimentConfig& config) {
  std::vector<Model> models;
  for (const auto& ex : build_extractors(config)) {
    const auto path = checkpoint_path(config, ex.model_name());
    if (!fs::exists(path)) {
      throw DataError(fmt::format("missing checkpoint {} (run the train command first)", path.string()));
    }
    auto model = load_checkpoint(path);
    if (model.fingerprint() != ex.fingerprint()) {
      throw DataError(fmt::format("checkpoint {} was trained with a different seed or extractor",
                                  path.string()));
    }
    models.push_back(std::move(model));
  }
  return models;
}

void stage_train(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const auto data = load_desk_data(config);
  log << fmt::format("[train] {} train / {} test images from {}\n", data.train.size(),
                     data.test.size(), config.resolved_data_dir().string());
  std::string clean = "model,fingerprint,accuracy\n";
  for (const auto& ex : build_extractors(config)) {
    const auto name = ex.model_name();
    const auto result = train_model(ex, data.train, config, cache_path(config, ex, mnist::Split::Train));
    for (const auto& e : result.history) {
      log << fmt::format("[train] {} epoch {:>3}  loss {:.6f}  acc {:.4f}\n", name, e.epoch, e.loss,
                         e.accuracy);
    }
    save_checkpoint(checkpoint_path(config, name), result.model);
    io::write_text(config.out_dir / "train" / (name + "_history.csv"), report::history_csv(result.history));

    const auto test_features = extract_features(ex, data.test.images, cache_path(config, ex, mnist::Split::Test));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < test_features.size(); ++i) {
      const auto p = dense_forward(test_features[i].data(), result.model.head());
      hits += (std::max_element(p.begin(), p.end()) - p.begin()) == data.test.images[i].label;
    }
    const double acc = static_cast<double>(hits) / static_cast<double>(test_features.size());
    log << fmt::format("[train] {} clean test accuracy {:.4f}\n", name, acc);
    clean += fmt::format("{},{},{:.17g}\n", name, ex.fingerprint(), acc);
  }
  io::write_text(config.out_dir / "train" / "clean_accuracy.csv", clean);
}

void stage_whitebox(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const auto models = load_trained_models(config);
  const auto data = load_desk_data(config);
  for (const auto& model : models) {
    for (auto kind : config.attacks) {
      const auto curve = evaluate_robustness(model, model.name(), data.test.images, config.attack_grid(kind));
      std::string line = fmt::format("[whitebox] {} {}:", model.name(), to_string(kind));
      for (const auto& [eps, acc] : curve.points) line += fmt::format(" {:.3g}->{:.3f}", eps, acc);
      log << line << "\n";
      io::write_text(config.out_dir / "whitebox" / report::curve_file_name(model.name(), kind),
                     report::curve_csv(curve));
    }
  }
}

void stage_transfer(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const auto models = load_trained_models(config);
  const auto data = load_desk_data(config);
  const auto rows = run_transfer_suite(models, data.test.images, config, config.out_dir / "adversarial");
  for (const auto& r : rows) {
    log << fmt::format("[transfer] {} -> {} eps {:.3g}: {:.3f}\n", r.source, r.target, r.epsilon, r.accuracy);
  }
  io::write_text(config.out_dir / "transfer" / "transfer_matrix.csv", report::transfer_csv(rows));
}

void stage_metrics(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const auto reports = run_metrics(config);
  for (const auto& r : reports) {
    log << fmt::format("[metrics] {} Q {:.6f} KL {:.6f}\n", to_string(r.kind), r.meyer_wallach,
                       r.expressibility_kl);
  }
  io::write_text(config.out_dir / "metrics" / "circuit_metrics.csv", report::metrics_csv(reports));
}

void stage_report(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const auto models = load_trained_models(config);
  const auto data = load_desk_data(config);
  report::write_manifest(config, data, models, config.out_dir);
  log << "[report] wrote " << (config.out_dir / "manifest.json").string() << "\n";
}

void stage_all(const ExperimentConfig& config, std::ostream& log) {
  stage_train(config, log);
  stage_whitebox(config, log);
  stage_transfer(config, log);
  stage_metrics(config, log);
  stage_report(config, log);
}

}  // namespace robqunn
