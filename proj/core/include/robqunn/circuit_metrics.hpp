#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "robqunn/ansatz.hpp"
#include "robqunn/qsim.hpp"

namespace robqunn::metrics {

inline constexpr int kDefaultSamples = 1000;
inline constexpr int kDefaultBins = 75;
inline constexpr double kHistogramSmoothing = 1e-9;

struct MetricReport {
  AnsatzKind kind = AnsatzKind::NoEnt;
  std::string fingerprint;
  std::uint64_t seed = 0;  // seed of the ansatz instance
  double meyer_wallach = 0.0;
  double expressibility_kl = 0.0;
  int samples = 0;
};

/// Tr(rho_q^2) of the reduced state of one qubit, by partial trace.
double single_qubit_purity(const qsim::StateVector& state, int qubit);
/// Same purity from the Schmidt coefficients of the (qubit | rest) split.
double single_qubit_purity_schmidt(const qsim::StateVector& state, int qubit);

/// Q = 2 (1 - mean_q Tr(rho_q^2)); 0 for product states, 1 for e.g. Bell pairs.
double meyer_wallach_of_state(const qsim::StateVector& state);

/// Mean Q of the ansatz applied to `samples` random angle-encoded product
/// inputs (pixels uniform in [0, 1], Ry(pi * pixel) per qubit).
double meyer_wallach(const Ansatz& ansatz, int samples, std::uint64_t seed);

/// Haar-random pure-state fidelity density (dim - 1)(1 - F)^(dim - 2).
double haar_fidelity_density(double fidelity, std::size_t dim);
/// Exact Haar probability mass of each of `bins` equal bins on [0, 1].
std::vector<double> haar_bin_probabilities(int bins, std::size_t dim);

/// KL(p || q) after adding `smoothing` to every entry and renormalizing.
double kl_divergence(std::span<const double> p, std::span<const double> q,
                     double smoothing = kHistogramSmoothing);

/// KL divergence between the histogram of |<psi_a|psi_b>|^2 over `samples`
/// pairs of independently seeded ansatz instances (applied to |0...0>) and
/// the Haar fidelity distribution. Throws std::invalid_argument for
/// samples < 2 or bins < 2.
double expressibility_kl(AnsatzKind kind, int n_qubits, int samples, int bins, std::uint64_t seed);

}  // namespace robqunn::metrics
