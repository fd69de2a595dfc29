#include "cvent/metrics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace cvent {

namespace {

constexpr double kPi = std::numbers::pi;

GaussianState source_state(const SourceSpec& src) {
  return apply_two_mode_pa(vacuum_state(2), 0, 1, src.gain);
}

void require_positive_snl(double snl) {
  if (!(snl > 0.0)) {
    throw std::domain_error(
        "power-detector shot-noise level vanishes (zero PSA gain or total loss); ratio undefined");
  }
}

struct ChainPair {
  MeasurementChain x;
  MeasurementChain y;
};

ChainPair chains_for(const SchemeSpec& scheme) {
  std::optional<PsaStage> psa;
  if (scheme.kind != SchemeKind::traditional_dual_bhd) {
    psa = NondegeneratePsaStage{0, 1, scheme.psa_gain->with_phase(scheme.psa_phase)};
  }
  auto bhd = [&](std::size_t arm, double phase) {
    BHDConfig cfg;
    cfg.lo_phase = phase;
    cfg.detection_loss = scheme.detection_loss[arm];
    return cfg;
  };
  switch (scheme.kind) {
    case SchemeKind::traditional_dual_bhd:
    case SchemeKind::psa_joint_bhd: {
      const CombinerConfig comb = scheme.combiner.value_or(CombinerConfig{});
      JointBhd x{0, 1, bhd(0, 0.0), bhd(1, 0.0), {comb.gain, CombinerSign::difference}};
      JointBhd y{0, 1, bhd(0, kPi / 2.0), bhd(1, kPi / 2.0), {comb.gain, CombinerSign::sum}};
      return {{2, psa, x}, {2, psa, y}};
    }
    case SchemeKind::psa_single_bhd: {
      const std::size_t arm = scheme.output_port == OutputPort::port1 ? 0 : 1;
      return {{2, psa, SingleBhd{arm, bhd(arm, 0.0)}}, {2, psa, SingleBhd{arm, bhd(arm, kPi / 2.0)}}};
    }
    case SchemeKind::psa_power_detector: {
      const MeasurementChain c{2, psa, PowerDetector{0, scheme.detection_loss[0]}};
      return {c, c};
    }
  }
  throw std::logic_error("unhandled scheme kind");
}

SchemeSpec psa_scheme(SchemeKind kind, const GainParam& psa, const LossChannel& loss) {
  SchemeSpec s;
  s.kind = kind;
  s.psa_gain = psa;
  s.psa_phase = kPi;
  s.detection_loss = {loss, loss};
  return s;
}

}  // namespace

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::traditional_dual_bhd:
      return "traditional";
    case SchemeKind::psa_power_detector:
      return "psa_power_detector";
    case SchemeKind::psa_joint_bhd:
      return "psa_joint";
    case SchemeKind::psa_single_bhd:
      return "psa_single";
  }
  return "unknown";
}

void SchemeSpec::validate() const {
  const bool needs_psa = kind != SchemeKind::traditional_dual_bhd;
  if (needs_psa && !psa_gain) {
    throw std::invalid_argument(fmt::format("scheme {} requires a PSA gain", to_string(kind)));
  }
  if (!needs_psa && psa_gain) {
    throw std::invalid_argument("the traditional scheme has no PSA");
  }
  const bool joint = kind == SchemeKind::traditional_dual_bhd || kind == SchemeKind::psa_joint_bhd;
  if (!joint && combiner) {
    throw std::invalid_argument(
        fmt::format("scheme {} has no electronic combiner", to_string(kind)));
  }
  if (combiner && !std::isfinite(combiner->gain)) {
    throw std::invalid_argument("combiner gain must be finite");
  }
  if (!std::isfinite(psa_phase)) {
    throw std::invalid_argument("PSA phase must be finite");
  }
}

MeasurementReport MeasurementReport::from_variances(double var_x_minus, double var_y_plus,
                                                    double snl) {
  MeasurementReport r;
  r.var_x_minus = var_x_minus;
  r.var_y_plus = var_y_plus;
  r.snl = snl;
  r.nor_x = var_x_minus / snl;
  r.nor_y = var_y_plus / snl;
  r.inseparability = r.nor_x + r.nor_y;
  return r;
}

MeasurementReport evaluate_scheme(const SourceSpec& src, const SchemeSpec& scheme) {
  scheme.validate();
  const GaussianState input = source_state(src);
  const ChainPair chains = chains_for(scheme);
  const double snl = snl_of(chains.x);
  if (scheme.kind == SchemeKind::psa_power_detector) {
    require_positive_snl(snl);
  }
  return MeasurementReport::from_variances(measure(chains.x, input), measure(chains.y, input), snl);
}

MeasurementReport source_metrics(const SourceSpec& src) {
  return traditional_metrics(src, LossChannel(0.0));
}

MeasurementReport traditional_metrics(const SourceSpec& src, const LossChannel& loss) {
  SchemeSpec s;
  s.kind = SchemeKind::traditional_dual_bhd;
  s.detection_loss = {loss, loss};
  s.combiner = CombinerConfig{1.0, CombinerSign::difference};
  return evaluate_scheme(src, s);
}

MeasurementReport psa_joint_metrics(const SourceSpec& src, const GainParam& psa, double lambda,
                                    const LossChannel& loss) {
  SchemeSpec s = psa_scheme(SchemeKind::psa_joint_bhd, psa, loss);
  s.combiner = CombinerConfig{lambda, CombinerSign::difference};
  return evaluate_scheme(src, s);
}

MeasurementReport psa_single_bhd_metrics(const SourceSpec& src, const GainParam& psa,
                                         OutputPort port, const LossChannel& loss) {
  SchemeSpec s = psa_scheme(SchemeKind::psa_single_bhd, psa, loss);
  s.output_port = port;
  return evaluate_scheme(src, s);
}

std::vector<double> psa_single_bhd_phase_scan(const SourceSpec& src, const GainParam& psa,
                                              std::span<const double> lo_phases) {
  if (lo_phases.empty()) {
    throw std::invalid_argument("phase scan needs at least one LO phase");
  }
  const GaussianState input = source_state(src);
  MeasurementChain chain{2, NondegeneratePsaStage{0, 1, psa.with_phase(kPi)}, SingleBhd{}};
  std::vector<double> out;
  out.reserve(lo_phases.size());
  for (double phase : lo_phases) {
    BHDConfig cfg;
    cfg.lo_phase = phase;
    chain.detector = SingleBhd{0, cfg};
    out.push_back(measure(chain, input) / snl_of(chain));
  }
  return out;
}

PowerDetectorReport psa_power_detector_metrics(const SourceSpec& src, const GainParam& psa,
                                               const LossChannel& loss) {
  const GainParam deamp = psa.with_phase(kPi);
  const GaussianState input = source_state(src);
  PowerDetectorReport r;
  r.reading = nondegenerate_psa_intensity(input, 0, 1, deamp, loss);
  r.mean = r.reading.mean;
  r.snl = nondegenerate_psa_intensity(vacuum_state(2), 0, 1, deamp, loss).mean;
  require_positive_snl(r.snl);
  r.ratio = r.mean / r.snl;
  r.asymptote = source_metrics(src).inseparability / 2.0;
  return r;
}

std::optional<double> single_bhd_snl_crossing(const SourceSpec& src) {
  if (src.nu() == 0.0) {
    return std::nullopt;
  }
  auto excess = [&](double g) {
    return psa_single_bhd_metrics(src, GainParam(g), OutputPort::port1, LossChannel(0.0)).nor_x - 1.0;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) {
      return std::nullopt;
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace closed_form {

MeasurementReport source_metrics(double nu) { return traditional_metrics(nu, 0.0); }

MeasurementReport traditional_metrics(double nu, double loss) {
  const double mu = std::sqrt(1.0 + nu * nu);
  const double var = 2.0 * (1.0 - loss) * (mu - nu) * (mu - nu) + 2.0 * loss;
  return MeasurementReport::from_variances(var, var, 2.0);
}

MeasurementReport psa_joint_metrics(double nu, double g, double lambda, double loss) {
  const double mu = std::sqrt(1.0 + nu * nu);
  const double big = std::sqrt(1.0 + g * g);
  const double lead = big + lambda * g;   // weight on the first PSA input
  const double cross = g + lambda * big;  // weight on the conjugate of the second
  const double a = lead * mu - cross * nu;
  const double b = lead * nu - cross * mu;
  const double t = 1.0 - loss;
  const double vac = loss * (1.0 + lambda * lambda);
  const double var = t * (a * a + b * b) + vac;
  const double snl = t * (lead * lead + cross * cross) + vac;
  return MeasurementReport::from_variances(var, var, snl);
}

MeasurementReport psa_single_bhd_metrics(double nu, double g, OutputPort port, double loss) {
  const double mu = std::sqrt(1.0 + nu * nu);
  double big = std::sqrt(1.0 + g * g);
  double small = g;
  if (port == OutputPort::port2) {
    std::swap(big, small);
  }
  const double p = mu * big - nu * small;
  const double q = mu * small - nu * big;
  const double t = 1.0 - loss;
  const double var = t * (p * p + q * q) + loss;
  const double snl = t * (big * big + small * small) + loss;
  return MeasurementReport::from_variances(var, var, snl);
}

PowerDetectorReport psa_power_detector_metrics(double nu, double g, double loss) {
  const double mu = std::sqrt(1.0 + nu * nu);
  const double big = std::sqrt(1.0 + g * g);
  const double t = 1.0 - loss;
  PowerDetectorReport r;
  r.reading.terms[0] = t * (big + g) * (big + g) / 4.0 * (mu - nu) * (mu - nu);
  r.reading.terms[1] = t * (big - g) * (big - g) / 4.0 * (mu + nu) * (mu + nu);
  r.reading.terms[2] = -t / 2.0;
  const double q = big * nu - g * mu;
  r.reading.mean = t * q * q;
  r.mean = r.reading.mean;
  r.snl = t * g * g;
  require_positive_snl(r.snl);
  r.ratio = q * q / (g * g);
  r.asymptote = (mu - nu) * (mu - nu);
  return r;
}

}  // namespace closed_form

}  // namespace cvent
