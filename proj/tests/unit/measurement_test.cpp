#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cvent/measurement.hpp"

namespace cvent {
namespace {

constexpr double kPi = std::numbers::pi;

GaussianState tmsv(double nu) { return apply_two_mode_pa(vacuum_state(2), 0, 1, GainParam(nu)); }

/// Single mode with <Delta^2 X(phi/2)> = v and the conjugate quadrature at 1/v.
GaussianState squeezed(double v, double phi) {
  const double r = -0.5 * std::log(v);
  return apply_phase(apply_degenerate_psa(vacuum_state(1), 0, GainParam::from_rate(r, kPi)), 0,
                     phi / 2);
}

TEST(Bhd, ScalesWithElectronicGainAndLoPower) {
  const auto s = tmsv(1.0);
  BHDConfig cfg;
  cfg.lo_phase = 0.4;
  const double base = bhd_variance(s, 0, cfg);
  EXPECT_NEAR(base, quad_variance(s, {0, 0.4}), 1e-12);
  cfg.electronic_gain = 2.0;
  cfg.lo_amplitude_sq = 3.0;
  EXPECT_NEAR(bhd_variance(s, 0, cfg), 12.0 * base, 1e-12);
  cfg.detection_loss = LossChannel(0.25);
  EXPECT_NEAR(bhd_variance(s, 0, cfg), 12.0 * (0.75 * base + 0.25), 1e-12);
}

TEST(Bhd, RejectsInvalidConfig) {
  BHDConfig cfg;
  cfg.electronic_gain = 0.0;
  EXPECT_THROW(bhd_variance(vacuum_state(1), 0, cfg), std::invalid_argument);
  cfg.electronic_gain = 1.0;
  cfg.lo_amplitude_sq = -1.0;
  EXPECT_THROW(bhd_variance(vacuum_state(1), 0, cfg), std::invalid_argument);
}

TEST(JointBhd, ReproducesEprVariancesForUnitGain) {
  const double nu = 2.0;
  const double mu = std::sqrt(5.0);
  const auto s = tmsv(nu);
  BHDConfig x;
  BHDConfig y;
  y.lo_phase = kPi / 2;
  EXPECT_NEAR(joint_bhd_variance(s, 0, 1, x, x, {1.0, CombinerSign::difference}),
              2 * (mu - nu) * (mu - nu), 1e-12);
  EXPECT_NEAR(joint_bhd_variance(s, 0, 1, y, y, {1.0, CombinerSign::sum}),
              2 * (mu - nu) * (mu - nu), 1e-12);
  EXPECT_NEAR(joint_bhd_variance(s, 0, 1, x, x, {1.0, CombinerSign::sum}),
              2 * (mu + nu) * (mu + nu), 1e-10);
}

TEST(JointBhd, OptimalGainForLossyArmsBeatsUnitGain) {
  const auto s = tmsv(1.0);
  BHDConfig a;
  BHDConfig b;
  a.detection_loss = LossChannel(0.5);
  const double unit = joint_bhd_variance(s, 0, 1, a, b, {1.0, CombinerSign::difference});
  const double tuned = joint_bhd_variance(s, 0, 1, a, b, {0.8, CombinerSign::difference});
  EXPECT_LT(tuned, unit);
  EXPECT_THROW(joint_bhd_variance(s, 0, 0, a, b, {}), std::invalid_argument);
}

TEST(PsaIntensity, VacuumInputGivesShotNoiseLevel) {
  for (double g : {0.5, 1.0, 3.0, 10.0}) {
    const GainParam gain(g, 0.3);
    EXPECT_NEAR(degenerate_psa_intensity(vacuum_state(1), 0, gain, {}).mean, g * g, 1e-10 * g * g);
    EXPECT_NEAR(nondegenerate_psa_intensity(vacuum_state(2), 0, 1, gain, {}).mean, g * g,
                1e-10 * g * g);
    EXPECT_NEAR(nondegenerate_psa_intensity(vacuum_state(2), 1, 0, gain, {}).mean, g * g,
                1e-10 * g * g);
  }
}

TEST(PsaIntensity, TermsSumToMean) {
  const auto in = squeezed(0.25, 0.8);
  const auto r = degenerate_psa_intensity(in, 0, GainParam(2.0, 0.8), LossChannel(0.2));
  EXPECT_NEAR(r.dominant() + r.anti_squeezed() + r.remainder(), r.mean, 1e-12);
  EXPECT_NEAR(r.remainder(), -0.8 / 2, 1e-12);
  const auto n = nondegenerate_psa_intensity(tmsv(1.0), 0, 1, GainParam(2.0, kPi), LossChannel(0.3));
  EXPECT_NEAR(n.dominant() + n.anti_squeezed() + n.remainder(), n.mean, 1e-12);
}

TEST(PsaIntensity, MatchesPhotonNumberAfterTheAmplifier) {
  const auto in = squeezed(0.4, 1.1);
  const GainParam gain(1.7, 1.1);
  const auto out = apply_loss(apply_degenerate_psa(in, 0, gain), 0, LossChannel(0.35));
  EXPECT_NEAR(degenerate_psa_intensity(in, 0, gain, LossChannel(0.35)).mean,
              mean_photon_number(out, 0), 1e-10);
}

TEST(PsaIntensity, DominantTermTracksTheMatchedQuadrature) {
  // input <Delta^2 X> = 0.25 aligned with the PSA phase
  const auto in = squeezed(0.25, 0.0);
  const auto at3 = degenerate_psa_intensity(in, 0, GainParam(3.0, 0.0), {});
  EXPECT_NEAR(at3.dominant(), 2.3733541225631422, 1e-10);
  EXPECT_NEAR(at3.anti_squeezed(), 0.026334038989724008, 1e-12);
  const auto at35 = degenerate_psa_intensity(in, 0, GainParam(3.5, 0.0), {});
  EXPECT_GT(at35.dominant() / at35.anti_squeezed(), 100.0);
  const auto at10 = degenerate_psa_intensity(in, 0, GainParam(10.0, 0.0), {});
  EXPECT_GE(at10.dominant() / std::abs(at10.remainder()), 50.0);
  const auto at95 = degenerate_psa_intensity(in, 0, GainParam(9.5, 0.0), {});
  EXPECT_LT(at95.dominant() / std::abs(at95.remainder()), 50.0);
}

TEST(PowerDetector, RatioIndependentOfLoss) {
  const auto in = tmsv(2.0);
  const GainParam g(10.0, kPi);
  const double r0 = nondegenerate_psa_intensity(in, 0, 1, g, {}).mean /
                    nondegenerate_psa_intensity(vacuum_state(2), 0, 1, g, {}).mean;
  const double r5 = nondegenerate_psa_intensity(in, 0, 1, g, LossChannel(0.5)).mean /
                    nondegenerate_psa_intensity(vacuum_state(2), 0, 1, g, LossChannel(0.5)).mean;
  EXPECT_NEAR(r0, r5, 1e-12);
}

TEST(Chain, SnlSubstitutesVacuumAtThePsaInput) {
  MeasurementChain chain{2, NondegeneratePsaStage{0, 1, GainParam(3.0, kPi)}, SingleBhd{}};
  EXPECT_NEAR(snl_of(chain), 19.0, 1e-10);
  EXPECT_NEAR(measure(chain, vacuum_state(2)), snl_of(chain), 1e-12);
  MeasurementChain plain{2, std::nullopt, JointBhd{}};
  EXPECT_NEAR(snl_of(plain), 2.0, 1e-12);
  MeasurementChain pd{2, NondegeneratePsaStage{0, 1, GainParam(2.0, kPi)}, PowerDetector{}};
  EXPECT_NEAR(snl_of(pd), 4.0, 1e-10);
}

TEST(Chain, ValidatesModesAndInputSize) {
  MeasurementChain chain{2, DegeneratePsaStage{3, GainParam(1.0)}, SingleBhd{}};
  EXPECT_THROW(chain.validate(), std::invalid_argument);
  MeasurementChain ok{2, std::nullopt, SingleBhd{}};
  EXPECT_THROW(measure(ok, vacuum_state(3)), std::invalid_argument);
  MeasurementChain same{2, NondegeneratePsaStage{1, 1, GainParam(1.0)}, SingleBhd{}};
  EXPECT_THROW(same.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace cvent
