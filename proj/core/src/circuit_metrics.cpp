#include "robqunn/circuit_metrics.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "robqunn/quanv.hpp"
#include "robqunn/rng.hpp"

namespace robqunn::metrics {

double single_qubit_purity(const qsim::StateVector& state, int qubit) {
  if (qubit < 0 || qubit >= state.n_qubits()) throw std::invalid_argument("qubit out of range");
  const std::size_t bit = std::size_t{1} << qubit;
  double r00 = 0.0, r11 = 0.0;
  qsim::Complex r01{0.0, 0.0};
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (i & bit) continue;
    const auto a0 = state[i];
    const auto a1 = state[i | bit];
    r00 += std::norm(a0);
    r11 += std::norm(a1);
    r01 += a0 * std::conj(a1);
  }
  return r00 * r00 + r11 * r11 + 2.0 * std::norm(r01);
}

double single_qubit_purity_schmidt(const qsim::StateVector& state, int qubit) {
  if (qubit < 0 || qubit >= state.n_qubits()) throw std::invalid_argument("qubit out of range");
  const std::size_t rest = state.size() / 2;
  Eigen::MatrixXcd m(2, static_cast<Eigen::Index>(rest));
  for (std::size_t i = 0; i < state.size(); ++i) {
    const std::size_t row = (i >> qubit) & 1U;
    const std::size_t low = i & ((std::size_t{1} << qubit) - 1);
    const std::size_t col = ((i >> (qubit + 1)) << qubit) | low;
    m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = state[i];
  }
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  double purity = 0.0;
  for (const double s : svd.singularValues()) purity += std::pow(s, 4);
  return purity;
}

double meyer_wallach_of_state(const qsim::StateVector& state) {
  double mean = 0.0;
  for (int q = 0; q < state.n_qubits(); ++q) mean += single_qubit_purity(state, q);
  mean /= state.n_qubits();
  return std::clamp(2.0 * (1.0 - mean), 0.0, 1.0);
}

double meyer_wallach(const Ansatz& ansatz, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("meyer_wallach needs samples >= 1");
  Rng rng(seed);
  const auto zero = qsim::init_zero(ansatz.n_qubits());
  double total = 0.0;
  std::vector<double> pixels(static_cast<std::size_t>(ansatz.n_qubits()));
  for (int s = 0; s < samples; ++s) {
    for (auto& p : pixels) p = uniform01(rng);
    auto program = encoding_gates(pixels);
    program.insert(program.end(), ansatz.gates().begin(), ansatz.gates().end());
    total += meyer_wallach_of_state(qsim::run_program(zero, program));
  }
  return total / samples;
}

double haar_fidelity_density(double fidelity, std::size_t dim) {
  const double d = static_cast<double>(dim);
  return (d - 1.0) * std::pow(1.0 - fidelity, d - 2.0);
}

std::vector<double> haar_bin_probabilities(int bins, std::size_t dim) {
  // CDF(F) = 1 - (1 - F)^(dim - 1)
  std::vector<double> out(static_cast<std::size_t>(bins));
  const double power = static_cast<double>(dim) - 1.0;
  for (int b = 0; b < bins; ++b) {
    const double lo = static_cast<double>(b) / bins;
    const double hi = static_cast<double>(b + 1) / bins;
    out[static_cast<std::size_t>(b)] = std::pow(1.0 - lo, power) - std::pow(1.0 - hi, power);
  }
  return out;
}

double kl_divergence(std::span<const double> p, std::span<const double> q, double smoothing) {
  if (p.size() != q.size() || p.empty()) throw std::invalid_argument("kl_divergence: size mismatch");
  double p_total = 0.0, q_total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p_total += p[i] + smoothing;
    q_total += q[i] + smoothing;
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = (p[i] + smoothing) / p_total;
    const double qi = (q[i] + smoothing) / q_total;
    kl += pi * std::log(pi / qi);
  }
  return std::max(0.0, kl);
}

double expressibility_kl(AnsatzKind kind, int n_qubits, int samples, int bins, std::uint64_t seed) {
  if (samples < 2 || bins < 2) {
    throw std::invalid_argument(fmt::format("expressibility needs samples >= 2 and bins >= 2 (got {}, {})",
                                            samples, bins));
  }
  Rng rng(seed);
  const auto zero = qsim::init_zero(n_qubits);
  std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
  for (int s = 0; s < samples; ++s) {
    const auto a = qsim::run_program(zero, build_ansatz(kind, n_qubits, rng()).gates());
    const auto b = qsim::run_program(zero, build_ansatz(kind, n_qubits, rng()).gates());
    qsim::Complex overlap{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) overlap += std::conj(a[i]) * b[i];
    const double fidelity = std::clamp(std::norm(overlap), 0.0, 1.0);
    const auto bin = std::min(static_cast<std::size_t>(fidelity * bins), hist.size() - 1);
    hist[bin] += 1.0;
  }
  for (auto& h : hist) h /= samples;
  return kl_divergence(hist, haar_bin_probabilities(bins, zero.size()));
}

}  // namespace robqunn::metrics
