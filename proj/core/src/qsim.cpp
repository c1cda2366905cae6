#include "robqunn/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace robqunn::qsim {

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::ROT: return "ROT";
    case GateKind::ZZ: return "ZZ";
  }
  return "?";
}

GateKind parse_gate_kind(std::string_view name) {
  for (auto k : {GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::ROT, GateKind::ZZ}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                                std::to_string(kMaxQubits) + "]");
  }
  amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  amps_[0] = 1.0;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

StateVector init_zero(int n_qubits) { return StateVector(n_qubits); }

namespace {

using Mat2 = std::array<Complex, 4>;

Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat2 rx(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return {Complex{c, 0}, Complex{0, -s}, Complex{0, -s}, Complex{c, 0}};
}

Mat2 ry(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return {Complex{c, 0}, Complex{-s, 0}, Complex{s, 0}, Complex{c, 0}};
}

Mat2 rz(double t) {
  return {std::polar(1.0, -t / 2), Complex{0, 0}, Complex{0, 0}, std::polar(1.0, t / 2)};
}

void check_qubit(int q, int n_qubits) {
  if (q < 0 || q >= n_qubits) {
    throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range for " +
                                std::to_string(n_qubits) + "-qubit state");
  }
}

void apply_single(std::span<Complex> amps, const Mat2& m, int q) {
  const std::size_t stride = std::size_t{1} << q;
  for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const Complex a0 = amps[i];
      const Complex a1 = amps[i + stride];
      amps[i] = m[0] * a0 + m[1] * a1;
      amps[i + stride] = m[2] * a0 + m[3] * a1;
    }
  }
}

void apply_zz(std::span<Complex> amps, int p, int q, double phi) {
  const Complex same = std::polar(1.0, -phi);
  const Complex differ = std::polar(1.0, phi);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const bool parity = (((i >> p) ^ (i >> q)) & 1U) != 0;
    amps[i] *= parity ? differ : same;
  }
}

}  // namespace

std::array<Complex, 4> single_qubit_matrix(const Gate& gate) {
  switch (gate.kind) {
    case GateKind::RX: return rx(gate.angles[0]);
    case GateKind::RY: return ry(gate.angles[0]);
    case GateKind::RZ: return rz(gate.angles[0]);
    case GateKind::ROT: return mul(rz(gate.angles[0]), mul(ry(gate.angles[1]), rz(gate.angles[2])));
    case GateKind::ZZ: break;
  }
  throw std::invalid_argument("ZZ is not a single-qubit gate");
}

void validate_gate(const Gate& gate, int n_qubits) {
  check_qubit(gate.targets[0], n_qubits);
  if (gate.kind == GateKind::ZZ) {
    check_qubit(gate.targets[1], n_qubits);
    if (gate.targets[0] == gate.targets[1]) {
      throw std::invalid_argument("ZZ targets must be distinct");
    }
  }
}

void apply_gate(StateVector& state, const Gate& gate) {
  validate_gate(gate, state.n_qubits());
  if (gate.kind == GateKind::ZZ) {
    apply_zz(state.amps(), gate.targets[0], gate.targets[1], gate.angles[0]);
  } else {
    apply_single(state.amps(), single_qubit_matrix(gate), gate.targets[0]);
  }
}

StateVector run_program(StateVector state, std::span<const Gate> gates) {
  for (const auto& g : gates) apply_gate(state, g);
  return state;
}

double measure_z(const StateVector& state, int qubit) {
  check_qubit(qubit, state.n_qubits());
  double e = 0.0;
  const auto amps = state.amps();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    e += ((i >> qubit) & 1U) ? -p : p;
  }
  // Rounding in the sum can overshoot the exact bound by an ulp or two.
  return std::clamp(e, -1.0, 1.0);
}

std::vector<double> measure_all_z(const StateVector& state) {
  std::vector<double> out(static_cast<std::size_t>(state.n_qubits()), 0.0);
  const auto amps = state.amps();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    for (std::size_t q = 0; q < out.size(); ++q) out[q] += ((i >> q) & 1U) ? -p : p;
  }
  for (auto& e : out) e = std::clamp(e, -1.0, 1.0);
  return out;
}

std::vector<double> shift_derivative_all(const StateVector& input, std::span<const Gate> gates,
                                         std::size_t gate_index, int angle_index) {
  if (gate_index >= gates.size()) {
    throw std::invalid_argument("gate index " + std::to_string(gate_index) +
                                " is not a parameterized gate of the program");
  }
  const Gate& target = gates[gate_index];
  if (angle_index < 0 || angle_index >= angle_count(target.kind)) {
    throw std::invalid_argument("angle index " + std::to_string(angle_index) + " invalid for " +
                                std::string(to_string(target.kind)));
  }
  const bool zz = target.kind == GateKind::ZZ;
  const double shift = zz ? std::numbers::pi / 4 : std::numbers::pi / 2;
  const double factor = zz ? 1.0 : 0.5;

  std::vector<Gate> shifted(gates.begin(), gates.end());
  shifted[gate_index].angles[static_cast<std::size_t>(angle_index)] += shift;
  const auto plus = measure_all_z(run_program(input, shifted));
  shifted[gate_index].angles[static_cast<std::size_t>(angle_index)] -= 2 * shift;
  const auto minus = measure_all_z(run_program(input, shifted));

  std::vector<double> out(plus.size());
  for (std::size_t q = 0; q < out.size(); ++q) out[q] = factor * (plus[q] - minus[q]);
  return out;
}

double shift_derivative(const StateVector& input, std::span<const Gate> gates,
                        std::size_t gate_index, int angle_index, int qubit) {
  check_qubit(qubit, input.n_qubits());
  return shift_derivative_all(input, gates, gate_index, angle_index)[static_cast<std::size_t>(qubit)];
}

}  // namespace robqunn::qsim
