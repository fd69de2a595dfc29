// Temporal Schmidt-mode model of pulsed entanglement: per-mode gains from a
// weight ladder, local-oscillator mode overlaps, and the multimode
// inseparability of the traditional and PSA-assisted schemes.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cvent {

using Complex = std::complex<double>;

/// Schmidt weights r_j (descending, sum of squares 1) and a pump strength.
class ModeLadder {
 public:
  ModeLadder(std::vector<double> weights, double pump_strength);

  const std::vector<double>& weights() const { return weights_; }
  double pump_strength() const { return pump_strength_; }
  std::size_t size() const { return weights_.size(); }

 private:
  std::vector<double> weights_;
  double pump_strength_;
};

/// Per-mode (mu_j, nu_j) or (G_j, g_j), stored through the squeeze rate so
/// that very large gains stay representable. Modes past the end are vacuum
/// modes (rate 0).
class MultimodeGains {
 public:
  /// From explicit strengths nu_j (descending).
  static MultimodeGains from_strengths(std::vector<double> strengths);
  static MultimodeGains from_rates(std::vector<double> rates);

  std::size_t size() const { return rates_.size(); }
  double rate(std::size_t j) const { return j < rates_.size() ? rates_[j] : 0.0; }
  double conj_amplitude(std::size_t j) const;  // mu_j = cosh rate
  double strength(std::size_t j) const;        // nu_j = sinh rate
  /// (mu_j - nu_j)^2 = exp(-2 rate_j), the per-mode normalized noise reduction.
  double noise_reduction(std::size_t j) const;

 private:
  explicit MultimodeGains(std::vector<double> rates);
  std::vector<double> rates_;
};

/// LO projections onto the Schmidt modes, plus the two global LO phases.
struct LOOverlap {
  std::vector<Complex> xi;
  std::vector<Complex> zeta;
  double phi0 = 0.0;
  double psi0 = 0.0;

  /// max(|1 - sum |xi|^2|, |1 - sum |zeta|^2|).
  double normalization_defect() const;
};

inline constexpr double kOverlapTolerance = 1e-6;
inline constexpr double kSpectralNormTolerance = 1e-8;

/// Complex spectra sampled on a uniform frequency grid.
struct SpectralGrid {
  std::vector<double> omega;
  std::vector<Complex> lo_a;
  std::vector<Complex> lo_b;
  std::vector<std::vector<Complex>> modes_a;  // phi_j(omega)
  std::vector<std::vector<Complex>> modes_b;  // psi_j(omega)

  double spacing() const;
  void validate() const;
};

struct OverlapResult {
  LOOverlap overlap;
  double defect = 0.0;
  bool complete = true;  // defect within kOverlapTolerance
};

/// Flags attached to results of the large-gain multimode PSA formulas.
struct MultimodeResult {
  double value = 0.0;
  bool low_gain = false;             // G_1 < 3, large-gain formula unreliable
  bool leading_mode_unmatched = false;  // LO has no weight on mode 1
  std::size_t dominant_mode = 0;     // mode carrying the largest weight
};

inline constexpr double kLowGainThreshold = 3.0;

enum class MultimodePort { port1, port2 };

MultimodeGains gains_from_ladder(const ModeLadder& ladder);

OverlapResult overlap_from_spectra(const SpectralGrid& grid);

/// I^multi for the traditional dual-BHD scheme at the overlap's LO phases.
double multimode_traditional_I(const MultimodeGains& gains, const LOOverlap& lo);

/// I^multi with the common phase phi0 + psi0 shifted by each offset.
std::vector<double> multimode_phase_sensitivity(const MultimodeGains& gains, const LOOverlap& lo,
                                                std::span<const double> pump_phase_offsets);

MultimodeResult multimode_psa_single_I(const MultimodeGains& src_gains,
                                       const ModeLadder& psa_ladder, const LOOverlap& lo,
                                       MultimodePort port);

MultimodeResult multimode_psa_joint_I(const MultimodeGains& src_gains,
                                      const ModeLadder& psa_ladder, const LOOverlap& lo);

}  // namespace cvent
