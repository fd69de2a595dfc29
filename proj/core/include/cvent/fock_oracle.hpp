// Brute-force reference for the Gaussian calculations: states live in a
// truncated photon-number basis, transformations are exponentials of
// quadratic ladder-operator generators, and loss is a beamsplitter with a
// vacuum ancilla that is traced out. Nothing here touches the covariance code.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace cvent::fock {

using Complex = std::complex<double>;
using Ket = Eigen::VectorXcd;
using DenseOp = Eigen::MatrixXcd;
using SparseOp = Eigen::SparseMatrix<Complex>;

inline constexpr std::size_t kMaxModes = 3;
inline constexpr double kCutoffPopulationLimit = 1e-8;

/// Raised when a result is requested from a state with weight at the cutoff.
class CutoffError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor-product number basis; mode 0 is the fastest-varying index.
struct Basis {
  std::size_t n_modes = 1;
  std::size_t n_max = 0;

  std::size_t levels() const { return n_max + 1; }
  std::size_t dim() const;
  std::size_t stride(std::size_t mode) const;
};

enum class GeneratorKind {
  two_mode_squeeze,     // e^{i p} a^dag b^dag - e^{-i p} a b
  single_mode_squeeze,  // (e^{i p} a^dag^2 - e^{-i p} a^2) / 2
  beamsplitter,         // a^dag b - a b^dag
  phase,                // i a^dag a
};

/// Anti-Hermitian quadratic generator K; the unitary is exp(parameter * K).
struct QuadraticGenerator {
  GeneratorKind kind = GeneratorKind::phase;
  std::size_t mode_a = 0;
  std::size_t mode_b = 1;
  double phase = 0.0;
};

SparseOp annihilation(const Basis& basis, std::size_t mode);
SparseOp generator_matrix(const Basis& basis, const QuadraticGenerator& gen);

/// Dense exp(parameter * K) on the truncated space.
DenseOp build_unitary(const Basis& basis, const QuadraticGenerator& gen, double parameter);

/// exp(parameter * K) applied to the columns of `v` by short Taylor steps.
Eigen::MatrixXcd apply_exponential(const SparseOp& k, double parameter, Eigen::MatrixXcd v);

struct QuadTerm {
  std::size_t mode = 0;
  double angle = 0.0;
  double weight = 1.0;
};

/// Pure state over system modes followed by loss ancillas. The reduced state
/// of the system modes is what every observable sees.
class TruncatedState {
 public:
  static TruncatedState vacuum(std::size_t n_modes, std::size_t n_max);
  static TruncatedState number_state(std::span<const std::size_t> photons, std::size_t n_max);

  std::size_t n_modes() const { return system_modes_; }
  std::size_t n_ancillas() const { return basis_.n_modes - system_modes_; }
  std::size_t n_max() const { return basis_.n_max; }
  const Basis& full_basis() const { return basis_; }
  Basis system_basis() const { return {system_modes_, basis_.n_max}; }
  const Ket& amplitudes() const { return amps_; }

  /// exp(parameter * K) with K acting on system modes.
  TruncatedState evolve(const QuadraticGenerator& gen, double parameter) const;

  /// Mixes `mode` with a fresh vacuum ancilla on a beamsplitter of
  /// reflectivity L. The total number of modes is capped at kMaxModes.
  TruncatedState apply_loss(std::size_t mode, double reflectivity) const;

  double norm() const { return amps_.norm(); }

  /// Largest marginal weight on the top two levels of any mode.
  double cutoff_population() const;

  /// Probability of a number configuration of the system modes.
  double population(std::span<const std::size_t> photons) const;

  /// Explicit partial trace over the ancillas.
  DenseOp reduced_density() const;

 private:
  TruncatedState(Basis basis, std::size_t system_modes, Ket amps);

  /// Amplitudes viewed as (system dim) x (ancilla dim).
  Eigen::Map<const Eigen::MatrixXcd> as_matrix() const;

  Basis basis_;
  std::size_t system_modes_;
  Ket amps_;
};

/// Variance of sum_i w_i X_{m_i}(theta_i) in the reduced system state.
double quad_moments(const TruncatedState& state, std::span<const QuadTerm> terms);

/// <a^dag a> for one system mode.
double intensity_mean(const TruncatedState& state, std::size_t mode);

/// Squeeze rate r for an amplitude gain with sinh r = strength.
double squeeze_rate(double strength);

/// Beamsplitter angle transmitting 1 - L of the intensity.
double loss_angle(double reflectivity);

}  // namespace cvent::fock
