// Scheme-level evaluators: normalized noise reductions and the Duan
// inseparability for the four single-mode measurement schemes.
//
// Every evaluator exists twice. The functions in namespace cvent compose
// gaussian_state + measurement (simulation path); the functions in
// cvent::closed_form evaluate the analytic expressions directly. The two are
// kept independent so one can check the other.

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cvent/gaussian_state.hpp"
#include "cvent/measurement.hpp"

namespace cvent {

/// Two-mode entanglement source driven by vacuum: a PA of strength nu.
struct SourceSpec {
  GainParam gain;

  double mu() const { return gain.conj_amplitude(); }
  double nu() const { return gain.strength(); }
};

enum class SchemeKind { traditional_dual_bhd, psa_power_detector, psa_joint_bhd, psa_single_bhd };

enum class OutputPort { port1, port2 };

std::string_view to_string(SchemeKind kind);

struct SchemeSpec {
  SchemeKind kind = SchemeKind::traditional_dual_bhd;
  std::optional<GainParam> psa_gain;  // phase of the PSA is psa_phase below
  double psa_phase = 3.141592653589793;
  std::array<LossChannel, 2> detection_loss{};
  std::optional<CombinerConfig> combiner;
  OutputPort output_port = OutputPort::port1;

  void validate() const;
};

struct MeasurementReport {
  double var_x_minus = 0.0;
  double var_y_plus = 0.0;
  double snl = 0.0;
  double nor_x = 0.0;
  double nor_y = 0.0;
  double inseparability = 0.0;

  static MeasurementReport from_variances(double var_x_minus, double var_y_plus, double snl);
};

struct PowerDetectorReport {
  IntensityReading reading;
  double mean = 0.0;
  double snl = 0.0;
  double ratio = 0.0;      // mean / snl
  double asymptote = 0.0;  // I_s / 2, the infinite-gain value of the ratio
};

// ---- simulation path ------------------------------------------------------

/// Full simulation of one scheme. Accepts asymmetric per-arm loss and any PSA
/// phase. For the power-detector kind var_x_minus = var_y_plus = mean
/// intensity and inseparability = 2 * mean / snl.
MeasurementReport evaluate_scheme(const SourceSpec& src, const SchemeSpec& scheme);

MeasurementReport source_metrics(const SourceSpec& src);
MeasurementReport traditional_metrics(const SourceSpec& src, const LossChannel& loss);

// The PSA evaluators below always run the amplifier at de-amplification
// (phase pi); only the strength of `psa` is used.
MeasurementReport psa_joint_metrics(const SourceSpec& src, const GainParam& psa, double lambda,
                                    const LossChannel& loss);
MeasurementReport psa_single_bhd_metrics(const SourceSpec& src, const GainParam& psa,
                                         OutputPort port, const LossChannel& loss);
std::vector<double> psa_single_bhd_phase_scan(const SourceSpec& src, const GainParam& psa,
                                              std::span<const double> lo_phases);
PowerDetectorReport psa_power_detector_metrics(const SourceSpec& src, const GainParam& psa,
                                               const LossChannel& loss);

/// Smallest PSA strength g at which the single-BHD normalized noise drops to
/// the shot-noise level (lossless). nullopt when the source is not squeezed.
std::optional<double> single_bhd_snl_crossing(const SourceSpec& src);

namespace closed_form {

MeasurementReport source_metrics(double nu);
MeasurementReport traditional_metrics(double nu, double loss);
MeasurementReport psa_joint_metrics(double nu, double g, double lambda, double loss);
MeasurementReport psa_single_bhd_metrics(double nu, double g, OutputPort port, double loss);
/// mean / snl of the power detector behind a de-amplifying PSA.
PowerDetectorReport psa_power_detector_metrics(double nu, double g, double loss);

}  // namespace closed_form

}  // namespace cvent
