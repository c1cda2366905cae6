#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "oracle.hpp"
#include "robqunn/qsim.hpp"
#include "robqunn/rng.hpp"

namespace {

using namespace robqunn;
using qsim::Gate;
using std::numbers::pi;

constexpr double kTight = 1e-12;

// Expectation of Z on one qubit by central finite difference in one angle.
double central_difference(std::vector<Gate> gates, std::size_t gate, int angle, int qubit, int n,
                          double h = 1e-5) {
  const double a0 = gates[gate].angles[static_cast<std::size_t>(angle)];
  gates[gate].angles[static_cast<std::size_t>(angle)] = a0 + h;
  const double plus = qsim::measure_z(qsim::run_program(qsim::init_zero(n), gates), qubit);
  gates[gate].angles[static_cast<std::size_t>(angle)] = a0 - h;
  const double minus = qsim::measure_z(qsim::run_program(qsim::init_zero(n), gates), qubit);
  return (plus - minus) / (2 * h);
}

TEST(InitZero, SingleQubitIsKetZero) {
  const auto s = qsim::init_zero(1);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], qsim::Complex(1, 0));
  EXPECT_EQ(s[1], qsim::Complex(0, 0));
}

TEST(InitZero, FourQubitsHasSixteenAmplitudes) {
  const auto s = qsim::init_zero(4);
  ASSERT_EQ(s.size(), 16u);
  EXPECT_EQ(s[0], qsim::Complex(1, 0));
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_EQ(s[i], qsim::Complex(0, 0));
}

TEST(InitZero, ZExpectationIsPlusOne) { EXPECT_EQ(qsim::measure_z(qsim::init_zero(2), 0), 1.0); }

TEST(InitZero, RejectsOutOfRangeSizes) {
  EXPECT_THROW(qsim::init_zero(0), std::invalid_argument);
  EXPECT_THROW(qsim::init_zero(13), std::invalid_argument);
  EXPECT_NO_THROW(qsim::init_zero(12));
}

TEST(ApplyGate, RyPiFlipsZero) {
  auto s = qsim::init_zero(1);
  qsim::apply_gate(s, Gate::ry(0, pi));
  EXPECT_NEAR(std::abs(s[0]), 0.0, kTight);
  EXPECT_NEAR(s[1].real(), 1.0, kTight);
  EXPECT_NEAR(s[1].imag(), 0.0, kTight);
}

TEST(ApplyGate, RotOfZeroAnglesIsIdentity) {
  Rng rng(3);
  const auto prep = oracle::random_program(rng, 3, 12);
  const auto before = qsim::run_program(qsim::init_zero(3), prep);
  auto after = before;
  for (int q = 0; q < 3; ++q) qsim::apply_gate(after, Gate::rot(q, 0, 0, 0));
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_NEAR(std::abs(after[i] - before[i]), 0.0, kTight);
  }
}

TEST(ApplyGate, ZZOnZeroZeroIsAGlobalPhase) {
  const double phi = 0.731;
  auto s = qsim::init_zero(2);
  qsim::apply_gate(s, Gate::zz(0, 1, phi));
  const auto expected = std::exp(qsim::Complex(0, -phi));
  EXPECT_NEAR(std::abs(s[0] - expected), 0.0, kTight);
  EXPECT_EQ(qsim::measure_z(s, 0), 1.0);
  EXPECT_EQ(qsim::measure_z(s, 1), 1.0);
}

TEST(ApplyGate, ZZPhaseFollowsParity) {
  // Uniform superposition, then ZZ on (0, 2) of three qubits.
  const double phi = 1.1;
  auto s = qsim::init_zero(3);
  for (int q = 0; q < 3; ++q) qsim::apply_gate(s, Gate::ry(q, pi / 2));
  const auto before = s;
  qsim::apply_gate(s, Gate::zz(0, 2, phi));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool odd = ((i & 1u) != 0) != ((i & 4u) != 0);
    const auto phase = std::exp(qsim::Complex(0, odd ? phi : -phi));
    EXPECT_NEAR(std::abs(s[i] - phase * before[i]), 0.0, kTight) << "basis " << i;
  }
}

TEST(ApplyGate, RejectsInvalidTargets) {
  auto s = qsim::init_zero(2);
  EXPECT_THROW(qsim::apply_gate(s, Gate::rx(2, 0.1)), std::invalid_argument);
  EXPECT_THROW(qsim::apply_gate(s, Gate::rx(-1, 0.1)), std::invalid_argument);
  EXPECT_THROW(qsim::apply_gate(s, Gate::zz(1, 1, 0.1)), std::invalid_argument);
  EXPECT_THROW(qsim::apply_gate(s, Gate::zz(0, 5, 0.1)), std::invalid_argument);
}

TEST(MeasureZ, RyHalfPiGivesZero) {
  auto s = qsim::init_zero(1);
  qsim::apply_gate(s, Gate::ry(0, pi / 2));
  EXPECT_NEAR(qsim::measure_z(s, 0), 0.0, kTight);
}

TEST(MeasureZ, MatchesExplicitTwoByTwoChainForRy) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const double theta = uniform(rng, -2 * pi, 2 * pi);
    auto s = qsim::init_zero(1);
    qsim::apply_gate(s, Gate::ry(0, theta));
    const Eigen::Vector2cd psi = oracle::ry(theta) * oracle::zero_state(1);
    EXPECT_NEAR(qsim::measure_z(s, 0), oracle::expect_z(psi, 0), kTight);
    EXPECT_NEAR(qsim::measure_z(s, 0), std::cos(theta), kTight);
  }
}

// ROT(a, b, c) is the matrix product Rz(a) Ry(b) Rz(c): after Ry(theta)
// encoding, Rz(c) acts first, so the Bloch z-component is
// cos(theta) cos(b) - sin(theta) sin(b) cos(c). The trailing Rz(a) cannot
// change <Z>.
TEST(MeasureZ, RotAfterEncodingMatchesClosedForm) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const double theta = uniform(rng, 0, pi);
    const double a = uniform(rng, 0, 2 * pi);
    const double b = uniform(rng, 0, 2 * pi);
    const double c = uniform(rng, 0, 2 * pi);
    const std::vector<Gate> program{Gate::ry(0, theta), Gate::rot(0, a, b, c)};
    const double z = qsim::measure_z(qsim::run_program(qsim::init_zero(1), program), 0);
    const Eigen::Vector2cd psi =
        oracle::rz(a) * oracle::ry(b) * oracle::rz(c) * oracle::ry(theta) * oracle::zero_state(1);
    EXPECT_NEAR(z, oracle::expect_z(psi, 0), kTight);
    EXPECT_NEAR(z, std::cos(theta) * std::cos(b) - std::sin(theta) * std::sin(b) * std::cos(c), kTight);
  }
}

TEST(MeasureZ, RejectsInvalidQubit) {
  const auto s = qsim::init_zero(2);
  EXPECT_THROW(qsim::measure_z(s, 2), std::invalid_argument);
  EXPECT_THROW(qsim::measure_z(s, -1), std::invalid_argument);
}

TEST(MeasureZ, AllZAgreesWithSingleQubitReads) {
  Rng rng(13);
  const auto s = qsim::run_program(qsim::init_zero(4), oracle::random_program(rng, 4, 20));
  const auto all = qsim::measure_all_z(s);
  ASSERT_EQ(all.size(), 4u);
  for (int q = 0; q < 4; ++q) EXPECT_EQ(all[static_cast<std::size_t>(q)], qsim::measure_z(s, q));
}

TEST(RunProgram, EmptyProgramIsIdentity) {
  Rng rng(14);
  const auto s = qsim::run_program(qsim::init_zero(3), oracle::random_program(rng, 3, 9));
  const auto t = qsim::run_program(s, {});
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i], t[i]);
}

TEST(RunProgram, RyAnglesAdd) {
  const double a = 0.4;
  const double b = 1.9;
  const std::vector<Gate> split{Gate::ry(0, a), Gate::ry(0, b)};
  const std::vector<Gate> joined{Gate::ry(0, a + b)};
  const auto s = qsim::run_program(qsim::init_zero(1), split);
  const auto t = qsim::run_program(qsim::init_zero(1), joined);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(std::abs(s[i] - t[i]), 0.0, kTight);
}

TEST(RunProgram, MatchesKroneckerOracle) {
  Rng rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 4));
    const auto gates = oracle::random_program(rng, n, 1 + static_cast<int>(uniform_index(rng, 24)));
    const auto s = qsim::run_program(qsim::init_zero(n), gates);
    const Eigen::VectorXcd ref = oracle::program_unitary(gates, n) * oracle::zero_state(n);
    for (std::size_t i = 0; i < s.size(); ++i) {
      ASSERT_NEAR(std::abs(s[i] - ref(static_cast<Eigen::Index>(i))), 0.0, 1e-10)
          << "trial " << trial << " basis " << i;
    }
  }
}

TEST(RunProgram, MatchesOracleOnNonTrivialInput) {
  Rng rng(16);
  const auto prep = oracle::random_program(rng, 4, 10);
  const auto gates = oracle::random_program(rng, 4, 15);
  const auto input = qsim::run_program(qsim::init_zero(4), prep);
  const auto s = qsim::run_program(input, gates);
  Eigen::VectorXcd in(16);
  for (std::size_t i = 0; i < 16; ++i) in(static_cast<Eigen::Index>(i)) = input[i];
  const Eigen::VectorXcd ref = oracle::program_unitary(gates, 4) * in;
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(std::abs(s[i] - ref(static_cast<Eigen::Index>(i))), 0.0, 1e-10);
  }
}

TEST(Properties, NormIsPreserved) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 8));
    auto s = qsim::init_zero(n);
    for (const auto& g : oracle::random_program(rng, n, 60)) {
      qsim::apply_gate(s, g);
      ASSERT_LT(std::abs(s.norm() - 1.0), 1e-10);
    }
  }
}

TEST(Properties, ZExpectationIsBounded) {
  Rng rng(18);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = qsim::run_program(qsim::init_zero(4), oracle::random_program(rng, 4, 12));
    for (double z : qsim::measure_all_z(s)) {
      EXPECT_GE(z, -1.0);
      EXPECT_LE(z, 1.0);
    }
  }
}

TEST(Properties, GlobalPhaseIsInvisible) {
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = qsim::run_program(qsim::init_zero(3), oracle::random_program(rng, 3, 10));
    const auto before = qsim::measure_all_z(s);
    const auto phase = std::exp(qsim::Complex(0, uniform(rng, 0, 2 * pi)));
    for (auto& a : s.amps()) a *= phase;
    const auto after = qsim::measure_all_z(s);
    for (std::size_t q = 0; q < before.size(); ++q) EXPECT_NEAR(after[q], before[q], kTight);
  }
}

TEST(Properties, ZZOnBasisStatesIsAGlobalPhase) {
  for (std::size_t basis = 0; basis < 8; ++basis) {
    std::vector<Gate> prep;
    for (int q = 0; q < 3; ++q) {
      if ((basis >> q) & 1u) prep.push_back(Gate::rx(q, pi));
    }
    auto s = qsim::run_program(qsim::init_zero(3), prep);
    const auto before = qsim::measure_all_z(s);
    qsim::apply_gate(s, Gate::zz(0, 2, 0.9));
    qsim::apply_gate(s, Gate::zz(1, 0, 2.3));
    const auto after = qsim::measure_all_z(s);
    for (std::size_t q = 0; q < 3; ++q) EXPECT_NEAR(after[q], before[q], kTight);
  }
}

TEST(ShiftDerivative, StationaryAtZero) {
  const std::vector<Gate> gates{Gate::ry(0, 0.0)};
  EXPECT_NEAR(qsim::shift_derivative(qsim::init_zero(1), gates, 0, 0, 0), 0.0, kTight);
}

TEST(ShiftDerivative, MinusOneAtHalfPi) {
  const std::vector<Gate> gates{Gate::ry(0, pi / 2)};
  const double shift = qsim::shift_derivative(qsim::init_zero(1), gates, 0, 0, 0);
  EXPECT_NEAR(shift, -1.0, kTight);
  EXPECT_NEAR(shift, central_difference(gates, 0, 0, 0, 1), 1e-9);
}

TEST(ShiftDerivative, MatchesFiniteDifferenceOnRandomPrograms) {
  Rng rng(20);
  int checked = 0;
  int zz_checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto gates = oracle::random_program(rng, 4, 3 + static_cast<int>(uniform_index(rng, 15)));
    const auto g = static_cast<std::size_t>(uniform_index(rng, gates.size()));
    const int angle = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(qsim::angle_count(gates[g].kind))));
    const int qubit = static_cast<int>(uniform_index(rng, 4));
    const double shift = qsim::shift_derivative(qsim::init_zero(4), gates, g, angle, qubit);
    const double fd = central_difference(gates, g, angle, qubit, 4);
    ASSERT_NEAR(shift, fd, 1e-6) << "trial " << trial << " gate " << qsim::to_string(gates[g].kind);
    ++checked;
    if (gates[g].kind == qsim::GateKind::ZZ) ++zz_checked;
  }
  EXPECT_GE(checked, 100);
  EXPECT_GT(zz_checked, 0);
}

TEST(ShiftDerivative, AllQubitsAgreeWithSingleQubitCalls) {
  Rng rng(21);
  const auto input = qsim::run_program(qsim::init_zero(4), oracle::random_program(rng, 4, 6));
  const auto gates = oracle::random_program(rng, 4, 10);
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const auto all = qsim::shift_derivative_all(input, gates, g, 0);
    for (int q = 0; q < 4; ++q) {
      EXPECT_EQ(all[static_cast<std::size_t>(q)], qsim::shift_derivative(input, gates, g, 0, q));
    }
  }
}

TEST(ShiftDerivative, RejectsInvalidIndices) {
  const std::vector<Gate> gates{Gate::ry(0, 0.3), Gate::zz(0, 1, 0.2)};
  const auto s = qsim::init_zero(2);
  EXPECT_THROW(qsim::shift_derivative(s, gates, 2, 0, 0), std::invalid_argument);
  EXPECT_THROW(qsim::shift_derivative(s, gates, 0, 1, 0), std::invalid_argument);
  EXPECT_THROW(qsim::shift_derivative(s, gates, 1, 1, 0), std::invalid_argument);
  EXPECT_THROW(qsim::shift_derivative(s, gates, 0, 0, 2), std::invalid_argument);
}

TEST(GateKind, NamesRoundTrip) {
  for (auto k : {qsim::GateKind::RX, qsim::GateKind::RY, qsim::GateKind::RZ, qsim::GateKind::ROT,
                 qsim::GateKind::ZZ}) {
    EXPECT_EQ(qsim::parse_gate_kind(qsim::to_string(k)), k);
  }
  EXPECT_THROW(qsim::parse_gate_kind("CNOT"), std::invalid_argument);
}

}  // namespace
