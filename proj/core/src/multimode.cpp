#include "cvent/multimode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace cvent {

namespace {

void require_descending(const std::vector<double>& values, bool strict, const char* what) {
  for (std::size_t j = 1; j < values.size(); ++j) {
    const bool bad = strict ? !(values[j] < values[j - 1]) : !(values[j] <= values[j - 1]);
    if (bad) {
      throw std::invalid_argument(fmt::format("{} must be {}descending (entry {} = {} after {})",
                                              what, strict ? "strictly " : "", j, values[j],
                                              values[j - 1]));
    }
  }
}

double sum_sq(const std::vector<Complex>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0,
                         [](double acc, const Complex& c) { return acc + std::norm(c); });
}

Complex coeff(const std::vector<Complex>& v, std::size_t j) {
  return j < v.size() ? v[j] : Complex{};
}

void require_normalized(const LOOverlap& lo) {
  const double defect = lo.normalization_defect();
  if (!(defect <= kOverlapTolerance)) {
    throw std::invalid_argument(fmt::format(
        "LO overlaps must satisfy sum |xi|^2 = sum |zeta|^2 = 1; defect {:.3g} exceeds {:.0e}",
        defect, kOverlapTolerance));
  }
}

/// log(cosh x) without overflow.
double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

MultimodeResult weighted_inseparability(const MultimodeGains& src, const ModeLadder& ladder,
                                        const std::vector<double>& amplitudes) {
  // amplitudes[j] multiplies G_j; the result averages 2 (mu_j - nu_j)^2 with
  // weights amplitudes[j]^2 G_j^2.
  const std::size_t n = std::max({src.size(), ladder.size(), amplitudes.size()});
  auto amp = [&](std::size_t j) { return j < amplitudes.size() ? amplitudes[j] : 0.0; };
  auto weight = [&](std::size_t j) { return j < ladder.size() ? ladder.weights()[j] : 0.0; };

  MultimodeResult result;
  result.low_gain = std::cosh(weight(0) * ladder.pump_strength()) < kLowGainThreshold;
  result.leading_mode_unmatched = !(amp(0) > 0.0);

  std::vector<double> log_w(n, -std::numeric_limits<double>::infinity());
  if (std::isinf(ladder.pump_strength())) {
    // Only the matched modes with the largest Schmidt weight survive the limit.
    double top = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (amp(j) > 0.0) top = std::max(top, weight(j));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (amp(j) > 0.0 && weight(j) == top) log_w[j] = 2.0 * std::log(amp(j));
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      if (amp(j) > 0.0) {
        log_w[j] = 2.0 * std::log(amp(j)) + 2.0 * log_cosh(weight(j) * ladder.pump_strength());
      }
    }
  }
  const auto top = std::max_element(log_w.begin(), log_w.end());
  if (std::isinf(*top)) {
    throw std::invalid_argument("LO has no overlap with any mode");
  }
  result.dominant_mode = static_cast<std::size_t>(top - log_w.begin());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = std::exp(log_w[j] - *top);
    num += w * src.noise_reduction(j);
    den += w;
  }
  result.value = 2.0 * num / den;
  return result;
}

}  // namespace

ModeLadder::ModeLadder(std::vector<double> weights, double pump_strength)
    : weights_(std::move(weights)), pump_strength_(pump_strength) {
  if (weights_.empty()) {
    throw std::invalid_argument("mode ladder needs at least one weight");
  }
  for (double r : weights_) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument(fmt::format("Schmidt weights must be positive, got {}", r));
    }
  }
  require_descending(weights_, true, "Schmidt weights");
  const double norm = std::accumulate(weights_.begin(), weights_.end(), 0.0,
                                      [](double acc, double r) { return acc + r * r; });
  if (std::abs(norm - 1.0) > 1e-10) {
    throw std::invalid_argument(
        fmt::format("Schmidt weights must satisfy sum r^2 = 1, got {:.12g}", norm));
  }
  if (!(pump_strength_ >= 0.0)) {
    throw std::invalid_argument(
        fmt::format("pump strength must be non-negative, got {}", pump_strength_));
  }
}

MultimodeGains::MultimodeGains(std::vector<double> rates) : rates_(std::move(rates)) {
  for (double r : rates_) {
    if (!(r >= 0.0)) {
      throw std::invalid_argument(fmt::format("mode gains must be non-negative, got {}", r));
    }
  }
  require_descending(rates_, false, "mode gains");
}

MultimodeGains MultimodeGains::from_strengths(std::vector<double> strengths) {
  for (double& s : strengths) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument(fmt::format("mode strength must be finite and >= 0, got {}", s));
    }
    s = std::asinh(s);
  }
  return MultimodeGains(std::move(strengths));
}

MultimodeGains MultimodeGains::from_rates(std::vector<double> rates) {
  return MultimodeGains(std::move(rates));
}

double MultimodeGains::conj_amplitude(std::size_t j) const { return std::cosh(rate(j)); }
double MultimodeGains::strength(std::size_t j) const { return std::sinh(rate(j)); }
double MultimodeGains::noise_reduction(std::size_t j) const { return std::exp(-2.0 * rate(j)); }

double LOOverlap::normalization_defect() const {
  return std::max(std::abs(1.0 - sum_sq(xi)), std::abs(1.0 - sum_sq(zeta)));
}

double SpectralGrid::spacing() const {
  if (omega.size() < 2) {
    throw std::invalid_argument("spectral grid needs at least two samples");
  }
  return omega[1] - omega[0];
}

void SpectralGrid::validate() const {
  const double d = spacing();
  if (!(d > 0.0)) {
    throw std::invalid_argument("spectral grid must be increasing");
  }
  for (std::size_t k = 1; k < omega.size(); ++k) {
    if (std::abs((omega[k] - omega[k - 1]) - d) > 1e-9 * std::max(1.0, std::abs(d))) {
      throw std::invalid_argument(fmt::format("spectral grid is not uniform at sample {}", k));
    }
  }
  auto check = [&](const std::vector<Complex>& f, const std::string& name) {
    if (f.size() != omega.size()) {
      throw std::invalid_argument(fmt::format("{} has {} samples, grid has {}", name, f.size(),
                                              omega.size()));
    }
    const double norm = sum_sq(f) * d;
    if (std::abs(norm - 1.0) > kSpectralNormTolerance) {
      throw std::invalid_argument(
          fmt::format("{} is not unit-normalized on the grid (norm {:.12g})", name, norm));
    }
  };
  check(lo_a, "LO A spectrum");
  check(lo_b, "LO B spectrum");
  for (std::size_t j = 0; j < modes_a.size(); ++j) check(modes_a[j], fmt::format("phi_{}", j + 1));
  for (std::size_t j = 0; j < modes_b.size(); ++j) check(modes_b[j], fmt::format("psi_{}", j + 1));
}

MultimodeGains gains_from_ladder(const ModeLadder& ladder) {
  std::vector<double> rates;
  rates.reserve(ladder.size());
  for (double r : ladder.weights()) {
    rates.push_back(ladder.pump_strength() == 0.0 ? 0.0 : r * ladder.pump_strength());
  }
  return MultimodeGains::from_rates(std::move(rates));
}

OverlapResult overlap_from_spectra(const SpectralGrid& grid) {
  grid.validate();
  const double d = grid.spacing();
  auto project = [&](const std::vector<Complex>& lo, const std::vector<std::vector<Complex>>& modes) {
    std::vector<Complex> out;
    out.reserve(modes.size());
    for (const auto& mode : modes) {
      Complex acc{};
      for (std::size_t k = 0; k < lo.size(); ++k) acc += lo[k] * std::conj(mode[k]);
      out.push_back(acc * d);
    }
    return out;
  };
  OverlapResult r;
  r.overlap.xi = project(grid.lo_a, grid.modes_a);
  r.overlap.zeta = project(grid.lo_b, grid.modes_b);
  r.defect = r.overlap.normalization_defect();
  r.complete = r.defect <= kOverlapTolerance;
  return r;
}

double multimode_traditional_I(const MultimodeGains& gains, const LOOverlap& lo) {
  require_normalized(lo);
  const std::size_t n = std::max({gains.size(), lo.xi.size(), lo.zeta.size()});
  const Complex rot = std::polar(1.0, -(lo.phi0 + lo.psi0));
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double mu = gains.conj_amplitude(j);
    const double nu = gains.strength(j);
    const Complex xi = coeff(lo.xi, j);
    const Complex zc = std::conj(coeff(lo.zeta, j)) * rot;
    total += 2.0 * std::norm(mu * xi - nu * zc) + 2.0 * std::norm(nu * xi - mu * zc);
  }
  return total / 2.0;
}

std::vector<double> multimode_phase_sensitivity(const MultimodeGains& gains, const LOOverlap& lo,
                                                std::span<const double> pump_phase_offsets) {
  std::vector<double> out;
  out.reserve(pump_phase_offsets.size());
  LOOverlap shifted = lo;
  for (double offset : pump_phase_offsets) {
    shifted.phi0 = lo.phi0 + offset;
    out.push_back(multimode_traditional_I(gains, shifted));
  }
  return out;
}

MultimodeResult multimode_psa_single_I(const MultimodeGains& src_gains,
                                       const ModeLadder& psa_ladder, const LOOverlap& lo,
                                       MultimodePort port) {
  require_normalized(lo);
  const auto& c = port == MultimodePort::port1 ? lo.xi : lo.zeta;
  std::vector<double> amps;
  amps.reserve(c.size());
  for (const auto& v : c) amps.push_back(std::abs(v));
  return weighted_inseparability(src_gains, psa_ladder, amps);
}

MultimodeResult multimode_psa_joint_I(const MultimodeGains& src_gains,
                                      const ModeLadder& psa_ladder, const LOOverlap& lo) {
  require_normalized(lo);
  const std::size_t n = std::max(lo.xi.size(), lo.zeta.size());
  std::vector<double> amps(n);
  for (std::size_t j = 0; j < n; ++j) {
    amps[j] = std::abs(coeff(lo.xi, j)) + std::abs(coeff(lo.zeta, j));
  }
  return weighted_inseparability(src_gains, psa_ladder, amps);
}

}  // namespace cvent
