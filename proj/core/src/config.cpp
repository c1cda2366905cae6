#include "robqunn/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "robqunn/errors.hpp"
#include "robqunn/mnist.hpp"

namespace robqunn {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(fmt::format("config key '{}': cannot parse '{}'", key, value));
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  // from_chars for double is unavailable in older libstdc++.
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(value), &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("config key '{}': cannot parse '{}'", key, value));
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(fmt::format("config key '{}': expected true/false, got '{}'", key, value));
}

std::vector<AnsatzKind> parse_ansatz_list(const std::vector<std::string>& names) {
  std::vector<AnsatzKind> out;
  for (const auto& n : names) {
    try {
      out.push_back(parse_ansatz_kind(n));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

std::vector<AttackKind> parse_attack_list(std::string_view text) {
  std::vector<AttackKind> out;
  for (const auto& n : split_list(text)) {
    try {
      out.push_back(parse_attack_kind(n));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt_item) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += fmt_item(items[i]);
  }
  return out;
}

}  // namespace

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_real("eps_grid", item));
  return out;
}

void ExperimentConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (eps_grid.empty()) throw ConfigError("eps_grid must not be empty");
  if (eps_grid.front() != 0.0) throw ConfigError("eps_grid must start at 0");
  for (std::size_t i = 1; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > eps_grid[i - 1])) throw ConfigError("eps_grid must be strictly increasing");
  }
  if (attack_iterations < 1) throw ConfigError("attack_iterations must be >= 1");
  if (!(step_ratio > 0.0)) throw ConfigError("step_ratio must be > 0");
  if (!(momentum >= 0.0)) throw ConfigError("momentum must be >= 0");
  if (train_count < 1 || test_count < 1) throw ConfigError("train_count and test_count must be >= 1");
  if (metric_samples < 2) throw ConfigError("metric_samples must be >= 2");
  if (metric_bins < 2) throw ConfigError("metric_bins must be >= 2");
  if (ansatze.empty()) throw ConfigError("at least one ansatz is required");
  if (std::set(ansatze.begin(), ansatze.end()).size() != ansatze.size()) {
    throw ConfigError("ansatz list contains duplicates");
  }
  if (attacks.empty()) throw ConfigError("at least one attack is required");
  if (out_dir.empty()) throw ConfigError("out must not be empty");
}

std::vector<AttackSpec> ExperimentConfig::attack_grid(AttackKind kind) const {
  std::vector<AttackSpec> grid;
  for (double eps : eps_grid) {
    switch (kind) {
      case AttackKind::FGSM: grid.push_back(AttackSpec::fgsm(eps)); break;
      case AttackKind::PGD: grid.push_back(AttackSpec::pgd(eps, attack_iterations, step_ratio)); break;
      case AttackKind::MIM:
        grid.push_back(AttackSpec::mim(eps, attack_iterations, step_ratio, momentum));
        break;
    }
  }
  return grid;
}

std::filesystem::path ExperimentConfig::resolved_data_dir() const {
  return data_dir.empty() ? mnist::default_data_dir() : data_dir;
}

std::string ExperimentConfig::to_text() const {
  auto real = [](double v) { return fmt::format("{:.17g}", v); };
  std::string out;
  out += fmt::format("seed = {}\n", seed);
  out += fmt::format("ansatz = {}\n", join(ansatze, [](AnsatzKind k) { return std::string(to_string(k)); }));
  out += fmt::format("epochs = {}\n", epochs);
  out += fmt::format("batch_size = {}\n", batch_size);
  out += fmt::format("learning_rate = {}\n", real(learning_rate));
  out += fmt::format("attack = {}\n", join(attacks, [](AttackKind k) { return std::string(to_string(k)); }));
  out += fmt::format("eps_grid = {}\n", join(eps_grid, real));
  out += fmt::format("attack_iterations = {}\n", attack_iterations);
  out += fmt::format("step_ratio = {}\n", real(step_ratio));
  out += fmt::format("momentum = {}\n", real(momentum));
  out += fmt::format("train_count = {}\n", train_count);
  out += fmt::format("test_count = {}\n", test_count);
  out += fmt::format("stratified = {}\n", stratified ? "true" : "false");
  out += fmt::format("metric_samples = {}\n", metric_samples);
  out += fmt::format("metric_bins = {}\n", metric_bins);
  out += fmt::format("out = {}\n", out_dir.string());
  if (!data_dir.empty()) out += fmt::format("data_dir = {}\n", data_dir.string());
  return out;
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  ExperimentConfig cfg = std::move(base);
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("config line {}: expected 'key = value'", line_no));
    }
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(fmt::format("config key '{}' given twice", key));

    if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "ansatz") cfg.ansatze = parse_ansatz_list(split_list(value));
    else if (key == "epochs") cfg.epochs = parse_number<int>(key, value);
    else if (key == "batch_size") cfg.batch_size = parse_number<int>(key, value);
    else if (key == "learning_rate") cfg.learning_rate = parse_real(key, value);
    else if (key == "attack") cfg.attacks = parse_attack_list(value);
    else if (key == "eps_grid") cfg.eps_grid = parse_double_list(value);
    else if (key == "attack_iterations") cfg.attack_iterations = parse_number<int>(key, value);
    else if (key == "step_ratio") cfg.step_ratio = parse_real(key, value);
    else if (key == "momentum") cfg.momentum = parse_real(key, value);
    else if (key == "train_count") cfg.train_count = parse_number<std::size_t>(key, value);
    else if (key == "test_count") cfg.test_count = parse_number<std::size_t>(key, value);
    else if (key == "stratified") cfg.stratified = parse_bool(key, value);
    else if (key == "metric_samples") cfg.metric_samples = parse_number<int>(key, value);
    else if (key == "metric_bins") cfg.metric_bins = parse_number<int>(key, value);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "data_dir") cfg.data_dir = value;
    else throw ConfigError(fmt::format("config line {}: unknown key '{}'", line_no, key));
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_overrides(ExperimentConfig& config, const ConfigOverrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.epochs) config.epochs = *o.epochs;
  if (o.batch_size) config.batch_size = *o.batch_size;
  if (o.learning_rate) config.learning_rate = *o.learning_rate;
  if (!o.ansatze.empty()) {
    std::vector<std::string> names;
    for (const auto& a : o.ansatze) {
      for (auto& n : split_list(a)) names.push_back(std::move(n));
    }
    config.ansatze = parse_ansatz_list(names);
  }
  if (o.attacks) config.attacks = parse_attack_list(*o.attacks);
  if (o.eps_grid) config.eps_grid = parse_double_list(*o.eps_grid);
  if (o.train_count) config.train_count = *o.train_count;
  if (o.test_count) config.test_count = *o.test_count;
  if (o.out_dir) config.out_dir = *o.out_dir;
}

}  // namespace robqunn
