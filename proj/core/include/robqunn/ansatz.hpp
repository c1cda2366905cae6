#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robqunn/qsim.hpp"

namespace robqunn {

enum class AnsatzKind { NoEnt, ZZFull, ZZLinear, ZZStar, Random };

inline constexpr std::array kAllAnsatzKinds{AnsatzKind::NoEnt, AnsatzKind::ZZFull,
                                            AnsatzKind::ZZLinear, AnsatzKind::ZZStar,
                                            AnsatzKind::Random};

std::string_view to_string(AnsatzKind kind);
/// Throws std::invalid_argument on unknown names.
AnsatzKind parse_ansatz_kind(std::string_view name);

/// A fixed quanvolutional filter circuit. Immutable once built.
///
/// Gate layout: one ROT per qubit (0..n-1), then the entangling block.
///   NoEnt    - no two-qubit gates
///   ZZFull   - ZZ on every pair p < q, in (0,1), (0,2), ..., (n-2,n-1) order
///   ZZLinear - ZZ on (p, p+1) for p = 0..n-2
///   ZZStar   - ZZ on (0, p) for p = 1..n-1
///   Random   - one RX/RY/RZ per qubit, then a single ZZ on a random pair
/// All angles are independent uniform draws from [0, 2pi).
class Ansatz {
 public:
  AnsatzKind kind() const { return kind_; }
  int n_qubits() const { return n_qubits_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const qsim::Gate> gates() const { return gates_; }

  /// Flat list of gate angles in program order (3 per ROT, 1 otherwise).
  std::vector<double> angles() const;
  /// Copy with the angles replaced; throws std::invalid_argument on a size mismatch.
  Ansatz with_angles(std::span<const double> angles) const;

  /// Key-value text record, angles printed with 17 significant digits.
  std::string serialize() const;
  /// Inverse of serialize(): rebuilds the gate layout from (kind, n_qubits,
  /// seed) and installs the stored angles. Throws std::invalid_argument.
  static Ansatz deserialize(std::string_view text);

  /// Short SHA-256 of serialize().
  std::string fingerprint() const;

  bool operator==(const Ansatz&) const = default;

 private:
  friend Ansatz build_ansatz(AnsatzKind, int, std::uint64_t);
  Ansatz(AnsatzKind kind, int n_qubits, std::uint64_t seed, std::vector<qsim::Gate> gates)
      : kind_(kind), n_qubits_(n_qubits), seed_(seed), gates_(std::move(gates)) {}

  AnsatzKind kind_;
  int n_qubits_;
  std::uint64_t seed_;
  std::vector<qsim::Gate> gates_;
};

/// Throws std::invalid_argument when n_qubits is below 2 for entangling kinds
/// (1 for NoEnt) or above qsim::kMaxQubits.
Ansatz build_ansatz(AnsatzKind kind, int n_qubits, std::uint64_t seed);

int entangling_gate_count(const Ansatz& ansatz);

}  // namespace robqunn
