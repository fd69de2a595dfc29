// Zero-mean multimode Gaussian states and the linear/parametric maps that act
// on them.
//
// Quadratures are ordered (X1, Y1, X2, Y2, ...) with X = a + a^dagger and
// Y = -i(a - a^dagger). The covariance matrix is expressed in units of the
// vacuum quadrature variance, so the vacuum is the identity.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cvent {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Squeeze strength paired with its conjugate amplitude and a process phase.
///
/// For a two-mode source `strength` is nu and `conj_amplitude()` is mu; for a
/// phase-sensitive amplifier they are g and G. conj_amplitude^2 - strength^2 = 1.
class GainParam {
 public:
  GainParam() = default;
  explicit GainParam(double strength, double phase = 0.0);

  /// Builds the parameter from the hyperbolic squeeze rate r (strength = sinh r).
  static GainParam from_rate(double rate, double phase = 0.0);

  double strength() const { return strength_; }
  double conj_amplitude() const { return conj_amplitude_; }
  double phase() const { return phase_; }
  double rate() const;

  GainParam with_phase(double phase) const { return GainParam(strength_, phase); }

 private:
  double strength_ = 0.0;
  double conj_amplitude_ = 1.0;
  double phase_ = 0.0;
};

/// Beamsplitter loss with reflectivity L; the unused port carries vacuum.
class LossChannel {
 public:
  LossChannel() = default;
  explicit LossChannel(double reflectivity);

  double reflectivity() const { return reflectivity_; }
  double transmissivity() const { return 1.0 - reflectivity_; }

 private:
  double reflectivity_ = 0.0;
};

struct QuadratureSelector {
  std::size_t mode = 0;
  double angle = 0.0;  // X(angle) = a e^{-i angle} + a^dagger e^{i angle}
};

struct WeightedQuadrature {
  QuadratureSelector sel;
  double weight = 1.0;
};

struct PhysicalityReport {
  double symmetry_defect = 0.0;   // max |V - V^T| relative to max |V|
  double min_eigenvalue = 0.0;    // smallest eigenvalue of V + i Omega
  bool symmetric = true;
  bool uncertainty_ok = true;

  bool ok() const { return symmetric && uncertainty_ok; }
};

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kUncertaintyTolerance = 1e-9;

class GaussianState {
 public:
  /// Wraps an explicit covariance. Only the dimensions are validated here;
  /// use check_physicality() for the uncertainty bound.
  explicit GaussianState(Matrix cov);

  std::size_t n_modes() const { return static_cast<std::size_t>(cov_.rows() / 2); }
  const Matrix& cov() const { return cov_; }

  /// 2x2 covariance block of one mode.
  Eigen::Matrix2d block(std::size_t mode) const;

 private:
  Matrix cov_;
};

GaussianState vacuum_state(std::size_t n_modes);

/// Standard symplectic form, block diagonal with [[0, 1], [-1, 0]].
Matrix symplectic_form(std::size_t n_modes);

// Symplectic matrices of the unitary maps, acting on the full 2N space.
Matrix two_mode_squeezer_matrix(std::size_t n_modes, std::size_t mode_a, std::size_t mode_b,
                                const GainParam& gain);
Matrix single_mode_squeezer_matrix(std::size_t n_modes, std::size_t mode, const GainParam& gain);
Matrix phase_rotation_matrix(std::size_t n_modes, std::size_t mode, double angle);

/// a_a -> mu a_a + nu e^{i phase} a_b^dagger (and a <-> b).
GaussianState apply_two_mode_pa(const GaussianState& state, std::size_t mode_a,
                                std::size_t mode_b, const GainParam& gain);

/// a -> G a + g e^{i phase} a^dagger.
GaussianState apply_degenerate_psa(const GaussianState& state, std::size_t mode,
                                   const GainParam& gain);

/// Same transformation as the source PA; phase = pi is de-amplification.
GaussianState apply_nondegenerate_psa(const GaussianState& state, std::size_t mode_a,
                                      std::size_t mode_b, const GainParam& gain);

/// a -> sqrt(1-L) a + sqrt(L) v with v in vacuum.
GaussianState apply_loss(const GaussianState& state, std::size_t mode, const LossChannel& loss);

/// a -> a e^{i angle}.
GaussianState apply_phase(const GaussianState& state, std::size_t mode, double angle);

double quad_variance(const GaussianState& state, const QuadratureSelector& sel);

double linear_combo_variance(const GaussianState& state,
                             std::span<const WeightedQuadrature> terms);

PhysicalityReport check_physicality(const GaussianState& state);

/// Mean photon number of one mode of a zero-mean state.
double mean_photon_number(const GaussianState& state, std::size_t mode);

}  // namespace cvent
