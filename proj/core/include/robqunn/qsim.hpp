#pragma once

#include <array>
#include <complex>
#include <span>
#include <string_view>
#include <vector>

/// Dense statevector simulation of small registers.
///
/// Qubit q corresponds to bit q of the basis-state index (qubit 0 is the
/// least significant bit). Rotations follow R_a(t) = exp(-i t sigma_a / 2);
/// ROT(a, b, c) is the matrix product Rz(a) Ry(b) Rz(c), so Rz(c) acts first;
/// ZZ(phi) = exp(-i phi Z_p Z_q).
namespace robqunn::qsim {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 12;

enum class GateKind { RX, RY, RZ, ROT, ZZ };

std::string_view to_string(GateKind kind);
GateKind parse_gate_kind(std::string_view name);

constexpr int target_count(GateKind kind) { return kind == GateKind::ZZ ? 2 : 1; }
constexpr int angle_count(GateKind kind) { return kind == GateKind::ROT ? 3 : 1; }

struct Gate {
  GateKind kind = GateKind::RZ;
  std::array<int, 2> targets{};    // targets[1] is used by ZZ only
  std::array<double, 3> angles{};  // (alpha, beta, gamma) for ROT, angles[0] otherwise

  static Gate rx(int q, double theta) { return {GateKind::RX, {q, 0}, {theta, 0, 0}}; }
  static Gate ry(int q, double theta) { return {GateKind::RY, {q, 0}, {theta, 0, 0}}; }
  static Gate rz(int q, double theta) { return {GateKind::RZ, {q, 0}, {theta, 0, 0}}; }
  static Gate rot(int q, double a, double b, double c) { return {GateKind::ROT, {q, 0}, {a, b, c}}; }
  static Gate zz(int p, int q, double phi) { return {GateKind::ZZ, {p, q}, {phi, 0, 0}}; }

  bool operator==(const Gate&) const = default;
};

class StateVector {
 public:
  /// |0...0> on n_qubits; throws std::invalid_argument outside [1, kMaxQubits].
  explicit StateVector(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  std::size_t size() const { return amps_.size(); }
  std::span<const Complex> amps() const { return amps_; }
  std::span<Complex> amps() { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }
  Complex& operator[](std::size_t i) { return amps_[i]; }

  double norm() const;

 private:
  int n_qubits_;
  std::vector<Complex> amps_;
};

StateVector init_zero(int n_qubits);

/// 2x2 unitary of a single-qubit gate, row-major.
std::array<Complex, 4> single_qubit_matrix(const Gate& gate);

/// Throws std::invalid_argument if targets are out of range or not distinct.
void validate_gate(const Gate& gate, int n_qubits);

void apply_gate(StateVector& state, const Gate& gate);
StateVector run_program(StateVector state, std::span<const Gate> gates);

double measure_z(const StateVector& state, int qubit);
std::vector<double> measure_all_z(const StateVector& state);

/// d<Z_qubit>/d(angle) of gates[gate_index].angles[angle_index], evaluated on
/// run_program(input, gates) by the two-term parameter-shift rule:
/// shift pi/2 with factor 1/2 for rotations, pi/4 with factor 1 for ZZ.
double shift_derivative(const StateVector& input, std::span<const Gate> gates,
                        std::size_t gate_index, int angle_index, int qubit);

/// Same as shift_derivative for every qubit at once (one pair of shifted runs).
std::vector<double> shift_derivative_all(const StateVector& input, std::span<const Gate> gates,
                                         std::size_t gate_index, int angle_index);

}  // namespace robqunn::qsim
