#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cvent/metrics.hpp"

namespace cvent {
namespace {

constexpr double kPi = std::numbers::pi;

SourceSpec src(double nu) { return SourceSpec{GainParam(nu)}; }

void expect_report_near(const MeasurementReport& a, const MeasurementReport& b, double tol) {
  EXPECT_NEAR(a.var_x_minus, b.var_x_minus, tol * std::max(1.0, std::abs(b.var_x_minus)));
  EXPECT_NEAR(a.var_y_plus, b.var_y_plus, tol * std::max(1.0, std::abs(b.var_y_plus)));
  EXPECT_NEAR(a.snl, b.snl, tol * std::max(1.0, std::abs(b.snl)));
  EXPECT_NEAR(a.nor_x, b.nor_x, tol);
  EXPECT_NEAR(a.nor_y, b.nor_y, tol);
  EXPECT_NEAR(a.inseparability, b.inseparability, tol);
}

void expect_invariants(const MeasurementReport& r) {
  EXPECT_DOUBLE_EQ(r.nor_x, r.var_x_minus / r.snl);
  EXPECT_DOUBLE_EQ(r.nor_y, r.var_y_plus / r.snl);
  EXPECT_DOUBLE_EQ(r.inseparability, r.nor_x + r.nor_y);
}

TEST(Source, LevelsOfTheThreeSources) {
  const std::array<std::pair<double, double>, 3> levels{
      {{0.3, 0.553581609465367}, {0.6, 0.320571545237128}, {2.0, 0.0557280900008412}}};
  for (const auto& [nu, level] : levels) {
    const auto r = source_metrics(src(nu));
    EXPECT_NEAR(r.nor_x, level, 1e-12);
    EXPECT_NEAR(r.inseparability, 2 * level, 1e-12);
    expect_invariants(r);
  }
  EXPECT_NEAR(source_metrics(src(0.0)).inseparability, 2.0, 1e-15);
}

TEST(Traditional, LossDegradesTowardTwiceTheLoss) {
  EXPECT_NEAR(traditional_metrics(src(2.0), LossChannel(0.6)).inseparability, 1.24458247200067,
              1e-12);
  EXPECT_NEAR(traditional_metrics(src(100.0), LossChannel(0.3)).inseparability, 0.6, 1e-3);
}

TEST(PsaJoint, LossyEndpoint) {
  const auto r = psa_joint_metrics(src(2.0), GainParam(5.0), 1.0, LossChannel(0.6));
  EXPECT_NEAR(r.inseparability, 0.138828973397972, 1e-12);
  expect_invariants(r);
  EXPECT_NEAR(psa_joint_metrics(src(2.0), GainParam(3.0), 0.5, LossChannel(0.2)).inseparability,
              0.127906050257252, 1e-12);
}

TEST(PsaJoint, UnitLambdaIsGainIndependentWithoutLoss) {
  for (double g : {0.0, 1.0, 2.0, 3.0, 5.0, 10.0}) {
    EXPECT_NEAR(psa_joint_metrics(src(2.0), GainParam(g), 1.0, {}).inseparability,
                0.111456180001682, 1e-10);
  }
}

TEST(PsaJoint, ReducesToTraditionalAtZeroGain) {
  for (double l : {0.0, 0.3, 0.6}) {
    expect_report_near(psa_joint_metrics(src(2.0), GainParam(0.0), 1.0, LossChannel(l)),
                       traditional_metrics(src(2.0), LossChannel(l)), 1e-12);
  }
  expect_report_near(traditional_metrics(src(0.6), {}), source_metrics(src(0.6)), 1e-12);
}

TEST(PsaSingle, ClosedFormValues) {
  const auto r = psa_single_bhd_metrics(src(2.0), GainParam(3.0), OutputPort::port1, {});
  EXPECT_NEAR(r.nor_x, 0.0681248692225576, 1e-10);
  EXPECT_NEAR(r.nor_x, 1.2944 / 19.0, 1e-5);
  EXPECT_NEAR(r.nor_x, r.nor_y, 1e-14);
  EXPECT_NEAR(
      psa_single_bhd_metrics(src(2.0), GainParam(3.0), OutputPort::port1, LossChannel(0.3))
          .inseparability,
      0.177361876567649, 1e-12);
  EXPECT_NEAR(psa_single_bhd_metrics(src(2.0), GainParam(0.0), OutputPort::port1, {}).nor_x, 9.0,
              1e-12);
}

TEST(PsaSingle, PortsAgreeForSymmetricSource) {
  for (double g : {0.5, 2.0, 4.0}) {
    expect_report_near(
        psa_single_bhd_metrics(src(1.0), GainParam(g), OutputPort::port1, LossChannel(0.2)),
        psa_single_bhd_metrics(src(1.0), GainParam(g), OutputPort::port2, LossChannel(0.2)),
        1e-12);
  }
}

TEST(PsaSingle, DisentanglerSitsFarAboveTheSourceLevel) {
  const auto r = psa_single_bhd_metrics(src(0.3), GainParam(0.3), OutputPort::port1, {});
  EXPECT_GT(r.nor_x, 1.5 * source_metrics(src(0.3)).nor_x);
}

TEST(PhaseScan, IsFlatAcrossLoPhase) {
  std::vector<double> phases;
  for (int k = 0; k < 16; ++k) phases.push_back(2 * kPi * k / 16);
  const auto scan = psa_single_bhd_phase_scan(src(2.0), GainParam(3.0), phases);
  const auto [lo, hi] = std::minmax_element(scan.begin(), scan.end());
  EXPECT_LT(*hi - *lo, 1e-12);
  EXPECT_NEAR(scan.front(), 0.0681248692225576, 1e-10);
  for (double v : psa_single_bhd_phase_scan(src(0.0), GainParam(2.5), phases)) {
    EXPECT_NEAR(v, 1.0, 1e-12);
  }
  for (double v : psa_single_bhd_phase_scan(src(2.0), GainParam(0.0), phases)) {
    EXPECT_NEAR(v, 9.0, 1e-12);
  }
  EXPECT_THROW(psa_single_bhd_phase_scan(src(2.0), GainParam(3.0), {}), std::invalid_argument);
}

TEST(PowerDetector, ExactRatioAndItsAsymptote) {
  const auto r = psa_power_detector_metrics(src(2.0), GainParam(10.0), {});
  EXPECT_NEAR(r.ratio, 0.0511179783023073, 1e-12);
  EXPECT_NEAR(r.asymptote, 0.0557280900008412, 1e-12);
  // 8% below the asymptote at g = 10; within 2% only past g of about 21
  EXPECT_GT(std::abs(r.ratio - r.asymptote) / r.asymptote, 0.02);
  const auto far = psa_power_detector_metrics(src(2.0), GainParam(21.0), {});
  EXPECT_LT(std::abs(far.ratio - far.asymptote) / far.asymptote, 0.02);
  EXPECT_NEAR(psa_power_detector_metrics(src(2.0), GainParam(10.0), LossChannel(0.5)).ratio,
              r.ratio, 1e-12);
  EXPECT_NEAR(psa_power_detector_metrics(src(0.0), GainParam(3.0), {}).ratio, 1.0, 1e-12);
}

TEST(PowerDetector, ApproachesAsymptoteMonotonically) {
  double prev = INFINITY;
  for (double g : {2.0, 5.0, 10.0, 20.0, 50.0, 200.0}) {
    const auto r = psa_power_detector_metrics(src(2.0), GainParam(g), {});
    const double gap = std::abs(r.ratio - r.asymptote);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
}

TEST(PowerDetector, DegenerateInputsThrow) {
  EXPECT_THROW(psa_power_detector_metrics(src(2.0), GainParam(0.0), {}), std::domain_error);
  EXPECT_THROW(psa_power_detector_metrics(src(2.0), GainParam(1.0), LossChannel(1.0)),
               std::domain_error);
}

TEST(Ordering, LossToleranceImprovesWithGain) {
  double prev = INFINITY;
  for (double g : {0.0, 2.0, 3.0, 5.0}) {
    const double v = psa_joint_metrics(src(2.0), GainParam(g), 1.0, LossChannel(0.6)).inseparability;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Ordering, SingleBhdConvergesToSourceWithGain) {
  const double is = source_metrics(src(2.0)).inseparability;
  for (double l : {0.0, 0.3}) {
    double prev = INFINITY;
    for (double g : {2.0, 3.0, 5.0}) {
      const double v =
          psa_single_bhd_metrics(src(2.0), GainParam(g), OutputPort::port1, LossChannel(l))
              .inseparability;
      EXPECT_LT(std::abs(v - is), prev);
      prev = std::abs(v - is);
    }
  }
}

TEST(Ordering, JointBeatsSingleUnderLoss) {
  const double is = source_metrics(src(2.0)).inseparability;
  for (double g : {1.0, 2.0, 3.0, 5.0}) {
    for (double l : {0.0, 0.1, 0.3, 0.6}) {
      const double joint =
          psa_joint_metrics(src(2.0), GainParam(g), 1.0, LossChannel(l)).inseparability;
      const double single =
          psa_single_bhd_metrics(src(2.0), GainParam(g), OutputPort::port1, LossChannel(l))
              .inseparability;
      EXPECT_LE(std::abs(joint - is), std::abs(single - is) + 1e-12);
    }
  }
}

TEST(SnlCrossing, MatchesClosedFormAndGrowsWithSqueezing) {
  double prev = 0.0;
  for (double nu : {0.3, 0.6, 2.0}) {
    const auto g = single_bhd_snl_crossing(src(nu));
    ASSERT_TRUE(g.has_value());
    EXPECT_NEAR(*g, std::sinh(std::asinh(nu) / 2), 1e-10);
    EXPECT_GT(*g, prev);
    prev = *g;
  }
  EXPECT_FALSE(single_bhd_snl_crossing(src(0.0)).has_value());
}

TEST(DualPath, SimulationEqualsClosedFormOnRandomGrid) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> nu_d(0.0, 3.0);
  std::uniform_real_distribution<double> g_d(0.0, 6.0);
  std::uniform_real_distribution<double> l_d(0.0, 0.9);
  std::uniform_real_distribution<double> lam_d(0.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const double nu = nu_d(rng);
    const double g = g_d(rng);
    const double l = l_d(rng);
    const double lam = lam_d(rng);
    SCOPED_TRACE(testing::Message() << "nu=" << nu << " g=" << g << " L=" << l);
    expect_report_near(traditional_metrics(src(nu), LossChannel(l)),
                       closed_form::traditional_metrics(nu, l), 1e-10);
    expect_report_near(psa_joint_metrics(src(nu), GainParam(g), lam, LossChannel(l)),
                       closed_form::psa_joint_metrics(nu, g, lam, l), 1e-10);
    for (auto port : {OutputPort::port1, OutputPort::port2}) {
      expect_report_near(psa_single_bhd_metrics(src(nu), GainParam(g), port, LossChannel(l)),
                         closed_form::psa_single_bhd_metrics(nu, g, port, l), 1e-10);
    }
    if (g > 0.0) {
      const auto sim = psa_power_detector_metrics(src(nu), GainParam(g), LossChannel(l));
      const auto cf = closed_form::psa_power_detector_metrics(nu, g, l);
      EXPECT_NEAR(sim.ratio, cf.ratio, 1e-10 * std::max(1.0, cf.ratio));
      EXPECT_NEAR(sim.mean, cf.mean, 1e-10 * std::max(1.0, cf.mean));
    }
  }
}

TEST(EvaluateScheme, AsymmetricLossAndPhaseAreHonoured) {
  SchemeSpec s;
  s.kind = SchemeKind::psa_joint_bhd;
  s.psa_gain = GainParam(2.0);
  s.combiner = CombinerConfig{1.0, CombinerSign::difference};
  s.detection_loss = {LossChannel(0.1), LossChannel(0.4)};
  const auto asym = evaluate_scheme(src(1.5), s);
  expect_invariants(asym);
  s.detection_loss = {LossChannel(0.4), LossChannel(0.1)};
  EXPECT_NEAR(evaluate_scheme(src(1.5), s).inseparability, asym.inseparability, 1e-12);
  s.psa_phase = 0.0;
  EXPECT_GT(evaluate_scheme(src(1.5), s).inseparability, asym.inseparability);
}

TEST(EvaluateScheme, ValidatesSpec) {
  SchemeSpec s;
  s.kind = SchemeKind::psa_single_bhd;
  EXPECT_THROW(evaluate_scheme(src(1.0), s), std::invalid_argument);
  s.kind = SchemeKind::traditional_dual_bhd;
  s.psa_gain = GainParam(1.0);
  EXPECT_THROW(evaluate_scheme(src(1.0), s), std::invalid_argument);
}

}  // namespace
}  // namespace cvent
