#include <array>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cvent/fock_oracle.hpp"
#include "cvent/gaussian_state.hpp"
#include "cvent/measurement.hpp"
#include "cvent/oracle_check.hpp"

namespace cvent::fock {
namespace {

constexpr double kPi = std::numbers::pi;

TruncatedState tmsv(double nu, std::size_t n_max) {
  return TruncatedState::vacuum(2, n_max).evolve(
      {GeneratorKind::two_mode_squeeze, 0, 1, 0.0}, squeeze_rate(nu));
}

TEST(Basis, StridesPutModeZeroFastest) {
  const Basis b{3, 4};
  EXPECT_EQ(b.dim(), 125u);
  EXPECT_EQ(b.stride(0), 1u);
  EXPECT_EQ(b.stride(1), 5u);
  EXPECT_EQ(b.stride(2), 25u);
}

TEST(Operators, AnnihilationLowersNumberStates) {
  const Basis b{1, 5};
  const SparseOp a = annihilation(b, 0);
  EXPECT_NEAR(std::abs(a.coeff(2, 3)), std::sqrt(3.0), 1e-15);
  const DenseOp n = DenseOp(SparseOp(a.adjoint()) * a);
  for (int k = 0; k <= 5; ++k) EXPECT_NEAR(n(k, k).real(), k, 1e-14);
}

TEST(Operators, GeneratorsAreAntiHermitian) {
  const Basis b{2, 6};
  for (auto kind : {GeneratorKind::two_mode_squeeze, GeneratorKind::single_mode_squeeze,
                    GeneratorKind::beamsplitter, GeneratorKind::phase}) {
    const DenseOp k = DenseOp(generator_matrix(b, {kind, 0, 1, 0.7}));
    EXPECT_LT((k + k.adjoint()).norm(), 1e-13);
  }
  EXPECT_THROW(generator_matrix(b, {GeneratorKind::beamsplitter, 1, 1, 0.0}), std::invalid_argument);
}

TEST(Exponential, SteppedTaylorMatchesDenseExponential) {
  const Basis b{2, 8};
  const QuadraticGenerator gen{GeneratorKind::two_mode_squeeze, 0, 1, 0.4};
  const DenseOp u = build_unitary(b, gen, 0.6);
  const Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(b.dim()), 3);
  const Eigen::MatrixXcd w = apply_exponential(generator_matrix(b, gen), 0.6, v);
  EXPECT_LT((w - u.leftCols(3)).norm(), 1e-12);
  EXPECT_LT((u.adjoint() * u - DenseOp::Identity(u.rows(), u.cols())).norm(), 1e-12);
}

TEST(State, EvolutionPreservesNorm) {
  const auto s = tmsv(0.8, 30).evolve({GeneratorKind::beamsplitter, 0, 1, 0.0}, 0.7);
  EXPECT_NEAR(s.norm(), 1.0, 1e-12);
}

TEST(State, NumberStatePopulations) {
  const std::array<std::size_t, 2> photons{2, 1};
  const auto s = TruncatedState::number_state(photons, 4);
  EXPECT_DOUBLE_EQ(s.population(photons), 1.0);
  EXPECT_NEAR(intensity_mean(s, 0), 2.0, 1e-15);
  const std::array<std::size_t, 1> too_many{9};
  EXPECT_THROW(TruncatedState::number_state(too_many, 4), std::invalid_argument);
}

TEST(State, TwinBeamHasThermalMarginals) {
  const double nu = 0.5;
  const auto s = tmsv(nu, 30);
  const double nbar = nu * nu;
  for (std::size_t n = 0; n < 5; ++n) {
    const std::array<std::size_t, 2> pn{n, n};
    EXPECT_NEAR(s.population(pn), std::pow(nbar, n) / std::pow(1 + nbar, n + 1), 1e-12);
  }
  const std::array<std::size_t, 2> off{1, 0};
  EXPECT_NEAR(s.population(off), 0.0, 1e-15);
}

TEST(State, BeamsplitterLossThinsPhotonNumber) {
  const std::array<std::size_t, 1> three{3};
  const auto s = TruncatedState::number_state(three, 6).apply_loss(0, 0.25);
  EXPECT_EQ(s.n_ancillas(), 1u);
  EXPECT_NEAR(intensity_mean(s, 0), 3 * 0.75, 1e-12);
  for (std::size_t k = 0; k <= 3; ++k) {
    const std::array<std::size_t, 1> pk{k};
    const double binom = std::tgamma(4.0) / (std::tgamma(k + 1.0) * std::tgamma(4.0 - k));
    EXPECT_NEAR(s.population(pk), binom * std::pow(0.75, k) * std::pow(0.25, 3 - k), 1e-12);
  }
}

TEST(State, ReducedDensityIsAUnitTraceMixedState) {
  const auto s = tmsv(0.5, 12).apply_loss(0, 0.3);
  const DenseOp rho = s.reduced_density();
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-10);
  EXPECT_LT((rho - rho.adjoint()).norm(), 1e-13);
  EXPECT_LT((rho * rho).trace().real(), 1.0 - 1e-3);
}

TEST(State, ModeLimitIsEnforced) {
  const auto s = tmsv(0.2, 6).apply_loss(0, 0.1);
  EXPECT_THROW(s.apply_loss(1, 0.1), std::invalid_argument);
  EXPECT_THROW(TruncatedState::vacuum(4, 3), std::invalid_argument);
  EXPECT_THROW(s.evolve({GeneratorKind::phase, 2, 2, 0.0}, 0.3), std::invalid_argument);
}

TEST(Cutoff, RefusesResultsWithWeightAtTheEdge) {
  const auto s = TruncatedState::vacuum(1, 10).evolve(
      {GeneratorKind::single_mode_squeeze, 0, 0, 0.0}, squeeze_rate(2.0));
  EXPECT_GT(s.cutoff_population(), kCutoffPopulationLimit);
  const std::array<QuadTerm, 1> x{{{0, 0.0, 1.0}}};
  EXPECT_THROW(quad_moments(s, x), CutoffError);
  EXPECT_THROW(intensity_mean(s, 0), CutoffError);
}

TEST(Cutoff, ResultsAreConvergedBetween30And40) {
  const std::array<QuadTerm, 2> xm{{{0, 0.0, 1.0}, {1, 0.0, -1.0}}};
  const double at30 = quad_moments(tmsv(0.8, 30), xm);
  const double at40 = quad_moments(tmsv(0.8, 40), xm);
  EXPECT_LT(std::abs(at30 - at40), 1e-8);
}

TEST(Equivalence, TwoModeSourceMatchesCovariance) {
  for (double nu : {0.2, 0.5, 0.8}) {
    const auto f = tmsv(nu, 40);
    const auto g = apply_two_mode_pa(vacuum_state(2), 0, 1, GainParam(nu));
    for (double theta : {0.0, 0.6, kPi / 2}) {
      const std::array<QuadTerm, 2> terms{{{0, theta, 1.0}, {1, theta, -1.0}}};
      const std::vector<WeightedQuadrature> w{{{0, theta}, 1.0}, {{1, theta}, -1.0}};
      EXPECT_NEAR(quad_moments(f, terms), linear_combo_variance(g, w), 1e-6);
    }
  }
}

TEST(Equivalence, DegeneratePsaIntensityNeedsALargerCutoff) {
  // g = 1 puts ~8e-8 of the population at n_max = 40, so the oracle refuses it there.
  const auto gen = QuadraticGenerator{GeneratorKind::single_mode_squeeze, 0, 0, 0.5};
  EXPECT_THROW(intensity_mean(TruncatedState::vacuum(1, 40).evolve(gen, squeeze_rate(1.0)), 0),
               CutoffError);
  const auto s = TruncatedState::vacuum(1, 60).evolve(gen, squeeze_rate(1.0));
  EXPECT_NEAR(intensity_mean(s, 0),
              degenerate_psa_intensity(vacuum_state(1), 0, GainParam(1.0, 0.5), {}).mean, 1e-6);
}

TEST(Equivalence, NonDegeneratePsaBehindSourceWithLoss) {
  const auto f = tmsv(0.5, 40)
                     .evolve({GeneratorKind::two_mode_squeeze, 0, 1, kPi}, squeeze_rate(0.3))
                     .apply_loss(0, 0.35);
  auto g = apply_two_mode_pa(vacuum_state(2), 0, 1, GainParam(0.5));
  const auto in = g;
  g = apply_loss(apply_nondegenerate_psa(g, 0, 1, GainParam(0.3, kPi)), 0, LossChannel(0.35));
  EXPECT_NEAR(intensity_mean(f, 0), mean_photon_number(g, 0), 1e-6);
  EXPECT_NEAR(intensity_mean(f, 0),
              nondegenerate_psa_intensity(in, 0, 1, GainParam(0.3, kPi), LossChannel(0.35)).mean,
              1e-6);
  const std::array<QuadTerm, 1> x1{{{0, 0.4, 1.0}}};
  EXPECT_NEAR(quad_moments(f, x1), quad_variance(g, {0, 0.4}), 1e-6);
}

TEST(Equivalence, FullOracleCheckPasses) {
  const auto report = runner::run_oracle_check();
  EXPECT_TRUE(report.passed()) << runner::format_report(report, {});
  EXPECT_LT(report.seconds, 60.0);
}

TEST(Equivalence, OracleCheckReportsCutoffBeyondRange) {
  runner::OracleCheckOptions opts;
  opts.max_strength = 3.0;
  opts.n_max = 20;
  const auto report = runner::run_oracle_check(opts);
  EXPECT_FALSE(report.passed());
  EXPECT_TRUE(std::any_of(report.rows.begin(), report.rows.end(),
                          [](const auto& r) { return r.cutoff; }));
  opts.max_strength = 0.0;
  EXPECT_THROW(runner::run_oracle_check(opts), std::invalid_argument);
}

}  // namespace
}  // namespace cvent::fock
