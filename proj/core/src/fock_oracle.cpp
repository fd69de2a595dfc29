#include "cvent/fock_oracle.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace cvent::fock {

namespace {

constexpr Complex kI{0.0, 1.0};

std::size_t level_of(const Basis& basis, std::size_t index, std::size_t mode) {
  return (index / basis.stride(mode)) % basis.levels();
}

void require_mode(std::size_t n_modes, std::size_t mode) {
  if (mode >= n_modes) {
    throw std::invalid_argument(fmt::format("mode {} out of range ({} modes)", mode, n_modes));
  }
}

double max_column_sum(const SparseOp& k) {
  double best = 0.0;
  for (Eigen::Index c = 0; c < k.outerSize(); ++c) {
    double sum = 0.0;
    for (SparseOp::InnerIterator it(k, c); it; ++it) sum += std::abs(it.value());
    best = std::max(best, sum);
  }
  return best;
}

void check_cutoff(const TruncatedState& state) {
  const double pop = state.cutoff_population();
  if (!(pop < kCutoffPopulationLimit)) {
    throw CutoffError(fmt::format(
        "population {:.3g} at the Fock cutoff n_max={} exceeds {:.0e}; raise n_max",
        pop, state.n_max(), kCutoffPopulationLimit));
  }
}

}  // namespace

std::size_t Basis::dim() const {
  std::size_t d = 1;
  for (std::size_t k = 0; k < n_modes; ++k) d *= levels();
  return d;
}

std::size_t Basis::stride(std::size_t mode) const {
  std::size_t s = 1;
  for (std::size_t k = 0; k < mode; ++k) s *= levels();
  return s;
}

SparseOp annihilation(const Basis& basis, std::size_t mode) {
  require_mode(basis.n_modes, mode);
  const std::size_t dim = basis.dim();
  const std::size_t stride = basis.stride(mode);
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t n = level_of(basis, i, mode);
    if (n > 0) {
      entries.emplace_back(static_cast<int>(i - stride), static_cast<int>(i),
                           Complex(std::sqrt(static_cast<double>(n)), 0.0));
    }
  }
  SparseOp a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

SparseOp generator_matrix(const Basis& basis, const QuadraticGenerator& gen) {
  const SparseOp a = annihilation(basis, gen.mode_a);
  const SparseOp ad = SparseOp(a.adjoint());
  const Complex up = std::polar(1.0, gen.phase);
  const Complex down = std::conj(up);
  switch (gen.kind) {
    case GeneratorKind::two_mode_squeeze:
    case GeneratorKind::beamsplitter: {
      if (gen.mode_a == gen.mode_b) {
        throw std::invalid_argument("two-mode generator needs distinct modes");
      }
      const SparseOp b = annihilation(basis, gen.mode_b);
      const SparseOp bd = SparseOp(b.adjoint());
      if (gen.kind == GeneratorKind::two_mode_squeeze) {
        return SparseOp(up * (ad * bd) - down * (a * b));
      }
      return SparseOp(ad * b - a * bd);
    }
    case GeneratorKind::single_mode_squeeze:
      return SparseOp(0.5 * (up * (ad * ad) - down * (a * a)));
    case GeneratorKind::phase:
      return SparseOp(kI * (ad * a));
  }
  throw std::logic_error("unhandled generator kind");
}

DenseOp build_unitary(const Basis& basis, const QuadraticGenerator& gen, double parameter) {
  const DenseOp k = DenseOp(generator_matrix(basis, gen)) * parameter;
  return k.exp();
}

Eigen::MatrixXcd apply_exponential(const SparseOp& k, double parameter, Eigen::MatrixXcd v) {
  const double size = max_column_sum(k) * std::abs(parameter);
  const int steps = std::max(1, static_cast<int>(std::ceil(size)));
  const double h = parameter / steps;
  for (int s = 0; s < steps; ++s) {
    Eigen::MatrixXcd term = v;
    Eigen::MatrixXcd sum = v;
    for (int order = 1; order < 200; ++order) {
      term = (h / order) * (k * term);
      sum += term;
      if (term.norm() <= 1e-17 * sum.norm()) break;
    }
    v = std::move(sum);
  }
  return v;
}

TruncatedState::TruncatedState(Basis basis, std::size_t system_modes, Ket amps)
    : basis_(basis), system_modes_(system_modes), amps_(std::move(amps)) {}

TruncatedState TruncatedState::vacuum(std::size_t n_modes, std::size_t n_max) {
  if (n_modes == 0 || n_modes > kMaxModes) {
    throw std::invalid_argument(
        fmt::format("Fock oracle supports 1..{} modes, got {}", kMaxModes, n_modes));
  }
  const Basis basis{n_modes, n_max};
  Ket amps = Ket::Zero(static_cast<Eigen::Index>(basis.dim()));
  amps(0) = 1.0;
  return {basis, n_modes, std::move(amps)};
}

TruncatedState TruncatedState::number_state(std::span<const std::size_t> photons,
                                            std::size_t n_max) {
  TruncatedState s = vacuum(photons.size(), n_max);
  std::size_t index = 0;
  for (std::size_t k = 0; k < photons.size(); ++k) {
    if (photons[k] > n_max) {
      throw std::invalid_argument(
          fmt::format("{} photons in mode {} exceed the cutoff {}", photons[k], k, n_max));
    }
    index += photons[k] * s.basis_.stride(k);
  }
  s.amps_.setZero();
  s.amps_(static_cast<Eigen::Index>(index)) = 1.0;
  return s;
}

TruncatedState TruncatedState::evolve(const QuadraticGenerator& gen, double parameter) const {
  require_mode(system_modes_, gen.mode_a);
  if (gen.kind == GeneratorKind::two_mode_squeeze || gen.kind == GeneratorKind::beamsplitter) {
    require_mode(system_modes_, gen.mode_b);
  }
  const SparseOp k = generator_matrix(basis_, gen);
  Ket out = apply_exponential(k, parameter, amps_);
  return {basis_, system_modes_, std::move(out)};
}

TruncatedState TruncatedState::apply_loss(std::size_t mode, double reflectivity) const {
  require_mode(system_modes_, mode);
  if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
    throw std::invalid_argument(fmt::format("loss must lie in [0, 1], got {}", reflectivity));
  }
  if (basis_.n_modes + 1 > kMaxModes) {
    throw std::invalid_argument(
        fmt::format("loss ancilla would exceed the {}-mode oracle limit", kMaxModes));
  }
  const Basis wide{basis_.n_modes + 1, basis_.n_max};
  // The ancilla is the most significant index, so |psi> (x) |0> is a zero pad.
  Ket padded = Ket::Zero(static_cast<Eigen::Index>(wide.dim()));
  padded.head(amps_.size()) = amps_;
  const QuadraticGenerator bs{GeneratorKind::beamsplitter, mode, basis_.n_modes, 0.0};
  Ket out = apply_exponential(generator_matrix(wide, bs), loss_angle(reflectivity), padded);
  return {wide, system_modes_, std::move(out)};
}

double TruncatedState::cutoff_population() const {
  if (basis_.n_max == 0) return 1.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < basis_.n_modes; ++k) {
    double pop = 0.0;
    for (Eigen::Index i = 0; i < amps_.size(); ++i) {
      if (level_of(basis_, static_cast<std::size_t>(i), k) + 1 >= basis_.n_max) {
        pop += std::norm(amps_(i));
      }
    }
    worst = std::max(worst, pop);
  }
  return worst;
}

Eigen::Map<const Eigen::MatrixXcd> TruncatedState::as_matrix() const {
  const auto sys = static_cast<Eigen::Index>(system_basis().dim());
  return {amps_.data(), sys, amps_.size() / sys};
}

double TruncatedState::population(std::span<const std::size_t> photons) const {
  if (photons.size() != system_modes_) {
    throw std::invalid_argument("population needs one photon count per system mode");
  }
  const Basis sys = system_basis();
  std::size_t index = 0;
  for (std::size_t k = 0; k < photons.size(); ++k) {
    if (photons[k] > basis_.n_max) return 0.0;
    index += photons[k] * sys.stride(k);
  }
  return as_matrix().row(static_cast<Eigen::Index>(index)).squaredNorm();
}

DenseOp TruncatedState::reduced_density() const {
  const auto m = as_matrix();
  return m * m.adjoint();
}

double quad_moments(const TruncatedState& state, std::span<const QuadTerm> terms) {
  if (terms.empty()) {
    throw std::invalid_argument("quadrature combination needs at least one term");
  }
  check_cutoff(state);
  const Basis sys = state.system_basis();
  const auto dim = static_cast<Eigen::Index>(sys.dim());
  SparseOp w(dim, dim);
  for (const auto& t : terms) {
    require_mode(state.n_modes(), t.mode);
    const SparseOp a = annihilation(sys, t.mode);
    const Complex phase = std::polar(1.0, -t.angle);
    w += SparseOp(t.weight * (phase * a + std::conj(phase) * SparseOp(a.adjoint())));
  }
  const Eigen::Map<const Eigen::MatrixXcd> m(state.amplitudes().data(), dim,
                                             state.amplitudes().size() / dim);
  const Eigen::MatrixXcd wm = w * m;
  const double norm2 = m.squaredNorm();
  const double mean = (m.conjugate().cwiseProduct(wm)).sum().real() / norm2;
  const double second = wm.squaredNorm() / norm2;
  return std::max(0.0, second - mean * mean);
}

double intensity_mean(const TruncatedState& state, std::size_t mode) {
  require_mode(state.n_modes(), mode);
  check_cutoff(state);
  const Ket& amps = state.amplitudes();
  double total = 0.0;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    total += static_cast<double>(level_of(state.full_basis(), static_cast<std::size_t>(i), mode)) *
             std::norm(amps(i));
  }
  return total / amps.squaredNorm();
}

double squeeze_rate(double strength) { return std::asinh(strength); }

double loss_angle(double reflectivity) { return std::asin(std::sqrt(reflectivity)); }

}  // namespace cvent::fock
