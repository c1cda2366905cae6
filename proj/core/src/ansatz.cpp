#include "robqunn/ansatz.hpp"

#include <fmt/format.h>

#include <optional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "robqunn/hash.hpp"
#include "robqunn/rng.hpp"

namespace robqunn {

using qsim::Gate;
using qsim::GateKind;

std::string_view to_string(AnsatzKind kind) {
  switch (kind) {
    case AnsatzKind::NoEnt: return "NoEnt";
    case AnsatzKind::ZZFull: return "ZZFull";
    case AnsatzKind::ZZLinear: return "ZZLinear";
    case AnsatzKind::ZZStar: return "ZZStar";
    case AnsatzKind::Random: return "Random";
  }
  return "?";
}

AnsatzKind parse_ansatz_kind(std::string_view name) {
  for (auto k : kAllAnsatzKinds) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown ansatz kind '" + std::string(name) + "'");
}

Ansatz build_ansatz(AnsatzKind kind, int n_qubits, std::uint64_t seed) {
  const int minimum = kind == AnsatzKind::NoEnt ? 1 : 2;
  if (n_qubits < minimum || n_qubits > qsim::kMaxQubits) {
    throw std::invalid_argument(fmt::format("{} ansatz needs between {} and {} qubits, got {}",
                                            to_string(kind), minimum, qsim::kMaxQubits, n_qubits));
  }
  constexpr double kTwoPi = 2 * std::numbers::pi;
  Rng rng(seed);
  auto angle = [&] { return uniform(rng, 0.0, kTwoPi); };

  std::vector<Gate> gates;
  if (kind == AnsatzKind::Random) {
    constexpr std::array kChoices{GateKind::RX, GateKind::RY, GateKind::RZ};
    for (int q = 0; q < n_qubits; ++q) {
      const auto choice = kChoices[uniform_index(rng, kChoices.size())];
      gates.push_back({choice, {q, 0}, {angle(), 0, 0}});
    }
    const int p = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n_qubits)));
    int q = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n_qubits - 1)));
    if (q >= p) ++q;
    gates.push_back(Gate::zz(p, q, angle()));
    return Ansatz(kind, n_qubits, seed, std::move(gates));
  }

  for (int q = 0; q < n_qubits; ++q) {
    const double a = angle();
    const double b = angle();
    const double c = angle();
    gates.push_back(Gate::rot(q, a, b, c));
  }
  switch (kind) {
    case AnsatzKind::ZZFull:
      for (int p = 0; p < n_qubits - 1; ++p) {
        for (int q = p + 1; q < n_qubits; ++q) gates.push_back(Gate::zz(p, q, angle()));
      }
      break;
    case AnsatzKind::ZZLinear:
      for (int p = 0; p < n_qubits - 1; ++p) gates.push_back(Gate::zz(p, p + 1, angle()));
      break;
    case AnsatzKind::ZZStar:
      for (int p = 1; p < n_qubits; ++p) gates.push_back(Gate::zz(0, p, angle()));
      break;
    default:
      break;
  }
  return Ansatz(kind, n_qubits, seed, std::move(gates));
}

int entangling_gate_count(const Ansatz& ansatz) {
  int count = 0;
  for (const auto& g : ansatz.gates()) count += qsim::target_count(g.kind) == 2;
  return count;
}

std::vector<double> Ansatz::angles() const {
  std::vector<double> out;
  for (const auto& g : gates_) {
    for (int i = 0; i < qsim::angle_count(g.kind); ++i) out.push_back(g.angles[static_cast<std::size_t>(i)]);
  }
  return out;
}

Ansatz Ansatz::with_angles(std::span<const double> values) const {
  Ansatz copy = *this;
  std::size_t next = 0;
  for (auto& g : copy.gates_) {
    for (int i = 0; i < qsim::angle_count(g.kind); ++i) {
      if (next >= values.size()) break;
      g.angles[static_cast<std::size_t>(i)] = values[next++];
    }
  }
  const auto expected = angles().size();
  if (values.size() != expected) {
    throw std::invalid_argument(
        fmt::format("ansatz expects {} angles, got {}", expected, values.size()));
  }
  return copy;
}

std::string Ansatz::serialize() const {
  std::string out;
  out += fmt::format("kind = {}\n", to_string(kind_));
  out += fmt::format("n_qubits = {}\n", n_qubits_);
  out += fmt::format("seed = {}\n", seed_);
  out += "angles =";
  for (double a : angles()) out += fmt::format(" {:.17g}", a);
  out += "\n";
  return out;
}

Ansatz Ansatz::deserialize(std::string_view text) {
  std::optional<AnsatzKind> kind;
  std::optional<int> n_qubits;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> angle_values;

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("ansatz record: bad line '" + line + "'");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "kind") {
      kind = parse_ansatz_kind(value);
    } else if (key == "n_qubits") {
      n_qubits = std::stoi(value);
    } else if (key == "seed") {
      seed = std::stoull(value);
    } else if (key == "angles") {
      std::vector<double> v;
      std::istringstream values(value);
      std::string token;
      while (values >> token) v.push_back(std::stod(token));
      angle_values = std::move(v);
    } else {
      throw std::invalid_argument("ansatz record: unknown key '" + key + "'");
    }
  }
  if (!kind || !n_qubits || !seed || !angle_values) {
    throw std::invalid_argument("ansatz record: missing field");
  }
  return build_ansatz(*kind, *n_qubits, *seed).with_angles(*angle_values);
}

std::string Ansatz::fingerprint() const { return short_fingerprint(serialize()); }

}  // namespace robqunn
