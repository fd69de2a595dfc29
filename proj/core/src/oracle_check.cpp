#include "cvent/oracle_check.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

#include "cvent/fock_oracle.hpp"
#include "cvent/gaussian_state.hpp"
#include "cvent/measurement.hpp"

namespace cvent::runner {

namespace {

constexpr double kPi = std::numbers::pi;

using fock::GeneratorKind;
using fock::QuadraticGenerator;
using fock::QuadTerm;
using fock::TruncatedState;

/// One step applied to both representations.
struct Step {
  enum class Kind { two_mode, single_mode, phase, loss } kind;
  std::size_t mode_a = 0;
  std::size_t mode_b = 1;
  double value = 0.0;  // strength, angle or reflectivity
  double phase = 0.0;
};

struct Observable {
  std::string name;
  std::vector<QuadTerm> terms;  // empty: photon number of `mode`
  std::size_t mode = 0;
};

struct Case {
  std::string name;
  std::size_t modes;
  std::vector<Step> steps;
  std::vector<Observable> observables;
};

GaussianState gaussian_run(const Case& c) {
  GaussianState s = vacuum_state(c.modes);
  for (const auto& st : c.steps) {
    switch (st.kind) {
      case Step::Kind::two_mode:
        s = apply_two_mode_pa(s, st.mode_a, st.mode_b, GainParam(st.value, st.phase));
        break;
      case Step::Kind::single_mode:
        s = apply_degenerate_psa(s, st.mode_a, GainParam(st.value, st.phase));
        break;
      case Step::Kind::phase:
        s = apply_phase(s, st.mode_a, st.value);
        break;
      case Step::Kind::loss:
        s = apply_loss(s, st.mode_a, LossChannel(st.value));
        break;
    }
  }
  return s;
}

TruncatedState oracle_run(const Case& c, std::size_t n_max) {
  TruncatedState s = TruncatedState::vacuum(c.modes, n_max);
  for (const auto& st : c.steps) {
    switch (st.kind) {
      case Step::Kind::two_mode:
        s = s.evolve({GeneratorKind::two_mode_squeeze, st.mode_a, st.mode_b, st.phase},
                     fock::squeeze_rate(st.value));
        break;
      case Step::Kind::single_mode:
        s = s.evolve({GeneratorKind::single_mode_squeeze, st.mode_a, st.mode_a, st.phase},
                     fock::squeeze_rate(st.value));
        break;
      case Step::Kind::phase:
        s = s.evolve({GeneratorKind::phase, st.mode_a, st.mode_a, 0.0}, st.value);
        break;
      case Step::Kind::loss:
        s = s.apply_loss(st.mode_a, st.value);
        break;
    }
  }
  return s;
}

double gaussian_value(const GaussianState& s, const Observable& o) {
  if (o.terms.empty()) return mean_photon_number(s, o.mode);
  std::vector<WeightedQuadrature> w;
  for (const auto& t : o.terms) w.push_back({{t.mode, t.angle}, t.weight});
  return linear_combo_variance(s, w);
}

double oracle_value(const TruncatedState& s, const Observable& o) {
  if (o.terms.empty()) return fock::intensity_mean(s, o.mode);
  return fock::quad_moments(s, o.terms);
}

Observable quad(std::string name, std::vector<QuadTerm> terms) {
  return {std::move(name), std::move(terms), 0};
}

Observable photons(std::string name, std::size_t mode) { return {std::move(name), {}, mode}; }

std::vector<Case> build_cases(double s) {
  const double m = std::min(0.5, s);
  const double w = std::min(0.3, s);
  using K = Step::Kind;
  const Observable x_minus = quad("var(X1 - X2)", {{0, 0.0, 1.0}, {1, 0.0, -1.0}});
  const Observable y_plus = quad("var(Y1 + Y2)", {{0, kPi / 2, 1.0}, {1, kPi / 2, 1.0}});
  return {
      {"two-mode source", 2, {{K::two_mode, 0, 1, s, 0.0}},
       {x_minus, y_plus, quad("var(X1(0.7))", {{0, 0.7, 1.0}}), photons("<n1>", 0)}},
      {"source, loss 0.4 on arm 1", 2, {{K::two_mode, 0, 1, s, 0.0}, {K::loss, 0, 0, 0.4, 0.0}},
       {x_minus, y_plus, photons("<n1>", 0)}},
      {"degenerate PSA on vacuum, phase 0.9", 1, {{K::single_mode, 0, 0, s, 0.9}},
       {quad("var(X(0))", {{0, 0.0, 1.0}}), quad("var(X(0.3))", {{0, 0.3, 1.0}}),
        photons("<n> = g^2", 0)}},
      {"squeezer then PSA", 1,
       {{K::single_mode, 0, 0, w, kPi}, {K::single_mode, 0, 0, m, 0.4}},
       {quad("var(X(0.2))", {{0, 0.2, 1.0}}), photons("<n>", 0)}},
      {"non-degenerate PSA on vacuum, phase pi/3", 2, {{K::two_mode, 0, 1, s, kPi / 3}},
       {quad("var(X1)", {{0, 0.0, 1.0}}), photons("<n1> = g^2", 0)}},
      {"source then de-amplifying PSA", 2,
       {{K::two_mode, 0, 1, m, 0.0}, {K::two_mode, 0, 1, w, kPi}},
       {x_minus, y_plus, quad("var(X1(0.5))", {{0, 0.5, 1.0}}), photons("<n1>", 0)}},
      {"source then amplifying PSA", 2,
       {{K::two_mode, 0, 1, m, 0.0}, {K::two_mode, 0, 1, w, 0.0}},
       {x_minus, photons("<n1>", 0), photons("<n2>", 1)}},
      {"dis-entangling PSA", 2, {{K::two_mode, 0, 1, w, 0.0}, {K::two_mode, 0, 1, w, kPi}},
       {x_minus, photons("<n1>", 0)}},
      {"rotated squeezer", 1, {{K::single_mode, 0, 0, s, 0.0}, {K::phase, 0, 0, 0.4, 0.0}},
       {quad("var(X(0))", {{0, 0.0, 1.0}}), quad("var(X(1.1))", {{0, 1.1, 1.0}})}},
      {"squeezer, loss 0.3", 1, {{K::single_mode, 0, 0, s, kPi}, {K::loss, 0, 0, 0.3, 0.0}},
       {quad("var(X)", {{0, 0.0, 1.0}}), quad("var(Y)", {{0, kPi / 2, 1.0}}),
        photons("<n>", 0)}},
      {"source, phase 0.5 on mode 2", 2,
       {{K::two_mode, 0, 1, s, 0.0}, {K::phase, 1, 1, 0.5, 0.0}},
       {x_minus, quad("var(X1 + X2(1.2))", {{0, 0.0, 1.0}, {1, 1.2, 1.0}})}},
      {"joint readout k = 0.7, loss 0.2 on arm 2", 2,
       {{K::two_mode, 0, 1, m, 0.0}, {K::two_mode, 0, 1, w, kPi}, {K::loss, 1, 1, 0.2, 0.0}},
       {quad("var(X1 - 0.7 X2)", {{0, 0.0, 1.0}, {1, 0.0, -0.7}}),
        quad("var(Y1 + 0.7 Y2)", {{0, kPi / 2, 1.0}, {1, kPi / 2, 0.7}})}},
  };
}

}  // namespace

double OracleComparison::difference() const { return std::abs(gaussian - oracle); }

bool OracleCheckReport::passed() const {
  return !rows.empty() &&
         std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.passed; });
}

OracleCheckReport run_oracle_check(const OracleCheckOptions& options) {
  if (!(options.max_strength > 0.0) || !std::isfinite(options.max_strength)) {
    throw std::invalid_argument(
        fmt::format("max strength must be positive, got {}", options.max_strength));
  }
  if (options.n_max < 2) {
    throw std::invalid_argument(fmt::format("n_max must be at least 2, got {}", options.n_max));
  }
  const auto t0 = std::chrono::steady_clock::now();
  OracleCheckReport report;
  for (const Case& c : build_cases(options.max_strength)) {
    const GaussianState g = gaussian_run(c);
    std::optional<TruncatedState> f;
    std::string failure;
    try {
      f = oracle_run(c, options.n_max);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    for (const auto& o : c.observables) {
      OracleComparison row{c.name, o.name, gaussian_value(g, o), 0.0, false, failure, false};
      if (f) {
        try {
          row.oracle = oracle_value(*f, o);
          row.passed = row.difference() <= options.tolerance;
        } catch (const fock::CutoffError& e) {
          row.cutoff = true;
          row.error = e.what();
        }
      }
      report.rows.push_back(std::move(row));
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string format_report(const OracleCheckReport& report, const OracleCheckOptions& options) {
  std::string out = fmt::format("oracle check: max strength {}, n_max {}, tolerance {:.0e}\n",
                                options.max_strength, options.n_max, options.tolerance);
  out += fmt::format("{:<6} {:<42} {:<20} {:>18} {:>18} {:>10}\n", "result", "case", "quantity",
                     "gaussian", "oracle", "|diff|");
  for (const auto& r : report.rows) {
    const char* verdict = r.passed ? "PASS" : (r.cutoff ? "CUTOFF" : "FAIL");
    out += fmt::format("{:<6} {:<42} {:<20} {:>18.12f} {:>18.12f} {:>10.2e}\n", verdict,
                       r.case_name, r.quantity, r.gaussian, r.oracle, r.difference());
    if (!r.error.empty()) out += fmt::format("       {}\n", r.error);
  }
  const auto failed = std::count_if(report.rows.begin(), report.rows.end(),
                                    [](const auto& r) { return !r.passed; });
  out += fmt::format("{} of {} comparisons passed in {:.2f} s\n",
                     report.rows.size() - static_cast<std::size_t>(failed), report.rows.size(),
                     report.seconds);
  return out;
}

}  // namespace cvent::runner
