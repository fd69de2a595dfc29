#include "cvent/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace cvent {

namespace {

void require_mode(std::size_t n_modes, std::size_t mode) {
  if (mode >= n_modes) {
    throw std::invalid_argument(
        fmt::format("mode index {} out of range for a {}-mode state", mode, n_modes));
  }
}

void require_pair(std::size_t n_modes, std::size_t mode_a, std::size_t mode_b) {
  require_mode(n_modes, mode_a);
  require_mode(n_modes, mode_b);
  if (mode_a == mode_b) {
    throw std::invalid_argument(fmt::format("two-mode operation on a single mode ({})", mode_a));
  }
}

GaussianState conjugate(const GaussianState& state, const Matrix& s) {
  Matrix out = s * state.cov() * s.transpose();
  // S V S^T is symmetric in exact arithmetic; remove rounding asymmetry.
  return GaussianState(0.5 * (out + out.transpose()));
}

}  // namespace

GainParam::GainParam(double strength, double phase)
    : strength_(strength), conj_amplitude_(std::sqrt(1.0 + strength * strength)), phase_(phase) {
  if (!(strength >= 0.0) || !std::isfinite(strength)) {
    throw std::invalid_argument(fmt::format("gain strength must be finite and >= 0, got {}", strength));
  }
  if (!std::isfinite(phase)) {
    throw std::invalid_argument("gain phase must be finite");
  }
}

GainParam GainParam::from_rate(double rate, double phase) {
  return GainParam(std::sinh(rate), phase);
}

double GainParam::rate() const { return std::asinh(strength_); }

LossChannel::LossChannel(double reflectivity) : reflectivity_(reflectivity) {
  if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
    throw std::invalid_argument(
        fmt::format("loss reflectivity must lie in [0, 1], got {}", reflectivity));
  }
}

GaussianState::GaussianState(Matrix cov) : cov_(std::move(cov)) {
  if (cov_.rows() == 0 || cov_.rows() != cov_.cols() || cov_.rows() % 2 != 0) {
    throw std::invalid_argument(fmt::format(
        "covariance must be a non-empty 2N x 2N matrix, got {} x {}", cov_.rows(), cov_.cols()));
  }
}

Eigen::Matrix2d GaussianState::block(std::size_t mode) const {
  require_mode(n_modes(), mode);
  const auto i = static_cast<Eigen::Index>(2 * mode);
  return cov_.block<2, 2>(i, i);
}

GaussianState vacuum_state(std::size_t n_modes) {
  if (n_modes == 0) {
    throw std::invalid_argument("a state needs at least one mode");
  }
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return GaussianState(Matrix::Identity(dim, dim));
}

Matrix symplectic_form(std::size_t n_modes) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Matrix omega = Matrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  return omega;
}

Matrix two_mode_squeezer_matrix(std::size_t n_modes, std::size_t mode_a, std::size_t mode_b,
                                const GainParam& gain) {
  require_pair(n_modes, mode_a, mode_b);
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Matrix s = Matrix::Identity(dim, dim);
  const double c = gain.conj_amplitude();
  const double sc = gain.strength() * std::cos(gain.phase());
  const double ss = gain.strength() * std::sin(gain.phase());
  // X_a' = c X_a + s cos(p) X_b + s sin(p) Y_b
  // Y_a' = c Y_a + s sin(p) X_b - s cos(p) Y_b
  const auto a = static_cast<Eigen::Index>(2 * mode_a);
  const auto b = static_cast<Eigen::Index>(2 * mode_b);
  for (auto [self, other] : {std::pair{a, b}, std::pair{b, a}}) {
    s(self, self) = c;
    s(self + 1, self + 1) = c;
    s(self, other) = sc;
    s(self, other + 1) = ss;
    s(self + 1, other) = ss;
    s(self + 1, other + 1) = -sc;
  }
  return s;
}

Matrix single_mode_squeezer_matrix(std::size_t n_modes, std::size_t mode, const GainParam& gain) {
  require_mode(n_modes, mode);
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Matrix s = Matrix::Identity(dim, dim);
  const double c = gain.conj_amplitude();
  const double sc = gain.strength() * std::cos(gain.phase());
  const double ss = gain.strength() * std::sin(gain.phase());
  const auto k = static_cast<Eigen::Index>(2 * mode);
  s(k, k) = c + sc;
  s(k, k + 1) = ss;
  s(k + 1, k) = ss;
  s(k + 1, k + 1) = c - sc;
  return s;
}

Matrix phase_rotation_matrix(std::size_t n_modes, std::size_t mode, double angle) {
  require_mode(n_modes, mode);
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Matrix s = Matrix::Identity(dim, dim);
  const double c = std::cos(angle);
  const double sn = std::sin(angle);
  const auto k = static_cast<Eigen::Index>(2 * mode);
  s(k, k) = c;
  s(k, k + 1) = -sn;
  s(k + 1, k) = sn;
  s(k + 1, k + 1) = c;
  return s;
}

GaussianState apply_two_mode_pa(const GaussianState& state, std::size_t mode_a,
                                std::size_t mode_b, const GainParam& gain) {
  return conjugate(state, two_mode_squeezer_matrix(state.n_modes(), mode_a, mode_b, gain));
}

GaussianState apply_degenerate_psa(const GaussianState& state, std::size_t mode,
                                   const GainParam& gain) {
  return conjugate(state, single_mode_squeezer_matrix(state.n_modes(), mode, gain));
}

GaussianState apply_nondegenerate_psa(const GaussianState& state, std::size_t mode_a,
                                      std::size_t mode_b, const GainParam& gain) {
  return conjugate(state, two_mode_squeezer_matrix(state.n_modes(), mode_a, mode_b, gain));
}

GaussianState apply_loss(const GaussianState& state, std::size_t mode, const LossChannel& loss) {
  require_mode(state.n_modes(), mode);
  const double t = loss.transmissivity();
  const double amp = std::sqrt(t);
  Matrix cov = state.cov();
  const auto k = static_cast<Eigen::Index>(2 * mode);
  cov.middleRows(k, 2) *= amp;
  cov.middleCols(k, 2) *= amp;
  // The diagonal block picked up amp^2 = t from the two scalings above.
  cov(k, k) += loss.reflectivity();
  cov(k + 1, k + 1) += loss.reflectivity();
  return GaussianState(std::move(cov));
}

GaussianState apply_phase(const GaussianState& state, std::size_t mode, double angle) {
  return conjugate(state, phase_rotation_matrix(state.n_modes(), mode, angle));
}

double quad_variance(const GaussianState& state, const QuadratureSelector& sel) {
  const WeightedQuadrature term{sel, 1.0};
  return linear_combo_variance(state, std::span(&term, 1));
}

double linear_combo_variance(const GaussianState& state,
                             std::span<const WeightedQuadrature> terms) {
  if (terms.empty()) {
    throw std::invalid_argument("linear combination needs at least one term");
  }
  Vector v = Vector::Zero(state.cov().rows());
  for (const auto& t : terms) {
    require_mode(state.n_modes(), t.sel.mode);
    const auto k = static_cast<Eigen::Index>(2 * t.sel.mode);
    v(k) += t.weight * std::cos(t.sel.angle);
    v(k + 1) += t.weight * std::sin(t.sel.angle);
  }
  return std::max(0.0, v.dot(state.cov() * v));
}

PhysicalityReport check_physicality(const GaussianState& state) {
  const Matrix& cov = state.cov();
  PhysicalityReport report;
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  report.symmetry_defect = (cov - cov.transpose()).cwiseAbs().maxCoeff() / scale;
  report.symmetric = report.symmetry_defect <= kSymmetryTolerance;

  const Matrix sym = 0.5 * (cov + cov.transpose());
  Eigen::MatrixXcd herm = sym.cast<std::complex<double>>();
  herm += std::complex<double>(0.0, 1.0) * symplectic_form(state.n_modes()).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  report.uncertainty_ok = report.min_eigenvalue >= -kUncertaintyTolerance * scale;
  return report;
}

double mean_photon_number(const GaussianState& state, std::size_t mode) {
  const Eigen::Matrix2d b = state.block(mode);
  // a^dagger a = (X^2 + Y^2)/4 - 1/2 for zero-mean states.
  return (b(0, 0) + b(1, 1) - 2.0) / 4.0;
}

}  // namespace cvent
