// Detector models: balanced homodyne detection (BHD), the electronic
// combiner of two BHD photocurrents, and a power detector behind a
// phase-sensitive amplifier (PSA). Shot-noise limits are obtained by
// re-running the same measurement chain with vacuum at the PSA inputs.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <variant>

#include "cvent/gaussian_state.hpp"

namespace cvent {

struct BHDConfig {
  double lo_phase = 0.0;
  double electronic_gain = 1.0;  // q
  LossChannel detection_loss{};
  double lo_amplitude_sq = 1.0;  // |alpha_L|^2

  void validate() const;
};

enum class CombinerSign { difference, sum };

struct CombinerConfig {
  double gain = 1.0;  // k for plain BHD pairs, lambda behind a PSA
  CombinerSign sign = CombinerSign::difference;
};

/// Mean output intensity split as
///   dominant (G+g)^2 term + anti-squeezed (G-g)^2 term + remainder.
/// The remainder is the -1/2 commutator term; for the non-degenerate PSA it
/// also carries the input power imbalance, which vanishes for symmetric inputs.
struct IntensityReading {
  double mean = 0.0;
  std::array<double, 3> terms{};

  double dominant() const { return terms[0]; }
  double anti_squeezed() const { return terms[1]; }
  double remainder() const { return terms[2]; }
};

double bhd_variance(const GaussianState& state, std::size_t mode, const BHDConfig& cfg);

double joint_bhd_variance(const GaussianState& state, std::size_t mode_a, std::size_t mode_b,
                          const BHDConfig& cfg_a, const BHDConfig& cfg_b,
                          const CombinerConfig& comb);

IntensityReading degenerate_psa_intensity(const GaussianState& input, std::size_t mode,
                                          const GainParam& gain, const LossChannel& loss_after);

/// Intensity at output port mode_a of a non-degenerate PSA fed by (mode_a, mode_b).
IntensityReading nondegenerate_psa_intensity(const GaussianState& input, std::size_t mode_a,
                                             std::size_t mode_b, const GainParam& gain,
                                             const LossChannel& loss_after);

// ---- measurement chains ---------------------------------------------------

struct DegeneratePsaStage {
  std::size_t mode = 0;
  GainParam gain;
};

struct NondegeneratePsaStage {
  std::size_t mode_a = 0;
  std::size_t mode_b = 1;
  GainParam gain;
};

using PsaStage = std::variant<DegeneratePsaStage, NondegeneratePsaStage>;

struct SingleBhd {
  std::size_t mode = 0;
  BHDConfig cfg;
};

struct JointBhd {
  std::size_t mode_a = 0;
  std::size_t mode_b = 1;
  BHDConfig cfg_a;
  BHDConfig cfg_b;
  CombinerConfig comb;
};

struct PowerDetector {
  std::size_t mode = 0;
  LossChannel loss;
};

using Detector = std::variant<SingleBhd, JointBhd, PowerDetector>;

/// Input fields -> optional PSA -> detector. The input state is the field
/// entering the PSA (or the detector when there is no PSA); that is where
/// snl_of substitutes vacuum.
struct MeasurementChain {
  std::size_t n_modes = 2;
  std::optional<PsaStage> psa;
  Detector detector;

  void validate() const;
};

/// Variance (BHD kinds) or mean intensity (power detector) of the chain.
double measure(const MeasurementChain& chain, const GaussianState& input);

/// The same measurement with vacuum at the chain input.
double snl_of(const MeasurementChain& chain);

}  // namespace cvent
