#include "cvent/measurement.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace cvent {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double photocurrent_scale(const BHDConfig& cfg) {
  return cfg.electronic_gain * std::sqrt(cfg.lo_amplitude_sq);
}

GaussianState apply_stage(const GaussianState& state, const PsaStage& stage) {
  return std::visit(
      overloaded{
          [&](const DegeneratePsaStage& s) { return apply_degenerate_psa(state, s.mode, s.gain); },
          [&](const NondegeneratePsaStage& s) {
            return apply_nondegenerate_psa(state, s.mode_a, s.mode_b, s.gain);
          },
      },
      stage);
}

void check_index(std::size_t n_modes, std::size_t mode, const char* what) {
  if (mode >= n_modes) {
    throw std::invalid_argument(
        fmt::format("{}: mode {} out of range for {} modes", what, mode, n_modes));
  }
}

}  // namespace

void BHDConfig::validate() const {
  if (!(electronic_gain > 0.0) || !std::isfinite(electronic_gain)) {
    throw std::invalid_argument(
        fmt::format("BHD electronic gain must be positive, got {}", electronic_gain));
  }
  if (!(lo_amplitude_sq > 0.0) || !std::isfinite(lo_amplitude_sq)) {
    throw std::invalid_argument(
        fmt::format("LO power |alpha_L|^2 must be positive, got {}", lo_amplitude_sq));
  }
}

double bhd_variance(const GaussianState& state, std::size_t mode, const BHDConfig& cfg) {
  cfg.validate();
  const GaussianState detected = apply_loss(state, mode, cfg.detection_loss);
  const double scale = photocurrent_scale(cfg);
  return scale * scale * quad_variance(detected, {mode, cfg.lo_phase});
}

double joint_bhd_variance(const GaussianState& state, std::size_t mode_a, std::size_t mode_b,
                          const BHDConfig& cfg_a, const BHDConfig& cfg_b,
                          const CombinerConfig& comb) {
  if (mode_a == mode_b) {
    throw std::invalid_argument("joint BHD needs two distinct modes");
  }
  if (!std::isfinite(comb.gain)) {
    throw std::invalid_argument("combiner gain must be finite");
  }
  cfg_a.validate();
  cfg_b.validate();
  GaussianState detected = apply_loss(state, mode_a, cfg_a.detection_loss);
  detected = apply_loss(detected, mode_b, cfg_b.detection_loss);
  const double sign = comb.sign == CombinerSign::difference ? -1.0 : 1.0;
  const std::array<WeightedQuadrature, 2> terms{{
      {{mode_a, cfg_a.lo_phase}, photocurrent_scale(cfg_a)},
      {{mode_b, cfg_b.lo_phase}, sign * comb.gain * photocurrent_scale(cfg_b)},
  }};
  return linear_combo_variance(detected, terms);
}

IntensityReading degenerate_psa_intensity(const GaussianState& input, std::size_t mode,
                                          const GainParam& gain, const LossChannel& loss_after) {
  check_index(input.n_modes(), mode, "degenerate PSA");
  const double big = gain.conj_amplitude() + gain.strength();
  const double small = gain.conj_amplitude() - gain.strength();
  // The amplified quadrature sits at half the pump-relative phase.
  const double angle = 0.5 * gain.phase();
  const double t = loss_after.transmissivity();
  IntensityReading r;
  r.terms[0] = t * big * big / 4.0 * quad_variance(input, {mode, angle});
  r.terms[1] = t * small * small / 4.0 *
               quad_variance(input, {mode, angle + std::numbers::pi / 2.0});
  r.terms[2] = -t / 2.0;
  r.mean = r.terms[0] + r.terms[1] + r.terms[2];
  return r;
}

IntensityReading nondegenerate_psa_intensity(const GaussianState& input, std::size_t mode_a,
                                             std::size_t mode_b, const GainParam& gain,
                                             const LossChannel& loss_after) {
  check_index(input.n_modes(), mode_a, "non-degenerate PSA");
  check_index(input.n_modes(), mode_b, "non-degenerate PSA");
  if (mode_a == mode_b) {
    throw std::invalid_argument("non-degenerate PSA needs two distinct modes");
  }
  const double big = gain.conj_amplitude() + gain.strength();
  const double small = gain.conj_amplitude() - gain.strength();
  const double c = 0.5 * gain.phase();
  const double q = c + std::numbers::pi / 2.0;
  auto combo = [&](double angle, double sign) {
    const std::array<WeightedQuadrature, 2> terms{{{{mode_a, angle}, 1.0}, {{mode_b, angle}, sign}}};
    return linear_combo_variance(input, terms);
  };
  const double t = loss_after.transmissivity();
  const Eigen::Matrix2d ba = input.block(mode_a);
  const Eigen::Matrix2d bb = input.block(mode_b);
  const double imbalance = (ba.trace() - bb.trace()) / 8.0;

  IntensityReading r;
  r.terms[0] = t * big * big / 16.0 * (combo(c, 1.0) + combo(q, -1.0));
  r.terms[1] = t * small * small / 16.0 * (combo(c, -1.0) + combo(q, 1.0));
  r.terms[2] = t * (imbalance - 0.5);
  r.mean = r.terms[0] + r.terms[1] + r.terms[2];
  return r;
}

void MeasurementChain::validate() const {
  if (n_modes == 0) {
    throw std::invalid_argument("measurement chain needs at least one mode");
  }
  if (psa) {
    std::visit(overloaded{
                   [&](const DegeneratePsaStage& s) { check_index(n_modes, s.mode, "PSA stage"); },
                   [&](const NondegeneratePsaStage& s) {
                     check_index(n_modes, s.mode_a, "PSA stage");
                     check_index(n_modes, s.mode_b, "PSA stage");
                     if (s.mode_a == s.mode_b) {
                       throw std::invalid_argument("PSA stage needs two distinct modes");
                     }
                   },
               },
               *psa);
  }
  std::visit(overloaded{
                 [&](const SingleBhd& d) {
                   check_index(n_modes, d.mode, "BHD");
                   d.cfg.validate();
                 },
                 [&](const JointBhd& d) {
                   check_index(n_modes, d.mode_a, "joint BHD");
                   check_index(n_modes, d.mode_b, "joint BHD");
                   if (d.mode_a == d.mode_b) {
                     throw std::invalid_argument("joint BHD needs two distinct modes");
                   }
                   d.cfg_a.validate();
                   d.cfg_b.validate();
                 },
                 [&](const PowerDetector& d) { check_index(n_modes, d.mode, "power detector"); },
             },
             detector);
}

double measure(const MeasurementChain& chain, const GaussianState& input) {
  chain.validate();
  if (input.n_modes() != chain.n_modes) {
    throw std::invalid_argument(fmt::format("chain expects {} modes, state has {}",
                                            chain.n_modes, input.n_modes()));
  }
  const GaussianState field = chain.psa ? apply_stage(input, *chain.psa) : input;
  return std::visit(
      overloaded{
          [&](const SingleBhd& d) { return bhd_variance(field, d.mode, d.cfg); },
          [&](const JointBhd& d) {
            return joint_bhd_variance(field, d.mode_a, d.mode_b, d.cfg_a, d.cfg_b, d.comb);
          },
          [&](const PowerDetector& d) {
            return mean_photon_number(apply_loss(field, d.mode, d.loss), d.mode);
          },
      },
      chain.detector);
}

double snl_of(const MeasurementChain& chain) {
  chain.validate();
  return measure(chain, vacuum_state(chain.n_modes));
}

}  // namespace cvent
