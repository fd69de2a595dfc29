#include "cvent/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "cvent/gaussian_state.hpp"
#include "cvent/measurement.hpp"
#include "cvent/metrics.hpp"
#include "cvent/multimode.hpp"

namespace cvent::runner {

namespace {

constexpr double kPi = std::numbers::pi;
// Relative distance from I_s / 2 beyond which a power-detector ratio is
// reported as outside its large-gain regime.
constexpr double kPowerDetectorTolerance = 0.02;

std::string format_error(const std::string& source, std::size_t line, const std::string& key,
                         const std::string& message) {
  std::string where = source;
  if (line > 0) where += fmt::format(":{}", line);
  if (!key.empty()) where += fmt::format(": {}", key);
  return fmt::format("{}: {}", where, message);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// "re", "re+imj", "re-imj" or "mag@phase".
std::optional<Complex> to_complex(std::string_view s) {
  s = trim(s);
  if (const auto at = s.find('@'); at != std::string_view::npos) {
    const auto mag = to_double(s.substr(0, at));
    const auto phase = to_double(s.substr(at + 1));
    if (!mag || !phase) return std::nullopt;
    return std::polar(*mag, *phase);
  }
  if (!s.empty() && s.back() == 'j') {
    const std::string_view body = s.substr(0, s.size() - 1);
    for (std::size_t k = body.size(); k-- > 1;) {
      if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
        const auto re = to_double(body.substr(0, k));
        const auto im = to_double(body.substr(k));
        if (!re || !im) return std::nullopt;
        return Complex{*re, *im};
      }
    }
    const auto im = to_double(body);
    if (!im) return std::nullopt;
    return Complex{0.0, *im};
  }
  const auto re = to_double(s);
  if (!re) return std::nullopt;
  return Complex{*re, 0.0};
}

std::string format_complex(const Complex& c) { return fmt::format("{}{:+}j", c.real(), c.imag()); }

template <class T>
std::string join(const std::vector<T>& values, auto&& fmt_one) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out += ", ";
    out += fmt_one(values[k]);
  }
  return out;
}

bool uses_psa(ScenarioKind k) {
  return k == ScenarioKind::psa_power_detector || k == ScenarioKind::psa_joint ||
         k == ScenarioKind::psa_single;
}

bool uses_combiner(ScenarioKind k) {
  return k == ScenarioKind::traditional || k == ScenarioKind::psa_joint;
}

bool uses_loss(ScenarioKind k) { return !is_multimode(k) && k != ScenarioKind::source; }

bool uses_psa_ladder(ScenarioKind k) {
  return k == ScenarioKind::multimode_psa_single || k == ScenarioKind::multimode_psa_joint;
}

/// Keys a scheme kind accepts besides the always-valid ones.
bool key_allowed(ScenarioKind kind, std::string_view key) {
  if (key == "scheme.kind" || key == "label" || key.starts_with("sweep.")) return true;
  if (key == "source.nu") return !is_multimode(kind);
  if (key == "source.nus" || key == "source.ladder" || key == "source.pump") {
    return is_multimode(kind);
  }
  if (key == "psa.g" || key == "psa.phase") return uses_psa(kind);
  if (key == "psa.ladder" || key == "psa.pump") return uses_psa_ladder(kind);
  if (key == "loss" || key == "loss.arm1" || key == "loss.arm2") return uses_loss(kind);
  if (key == "combiner.gain") return uses_combiner(kind);
  if (key == "scheme.port") {
    return kind == ScenarioKind::psa_single || kind == ScenarioKind::multimode_psa_single;
  }
  if (key.starts_with("lo.")) return is_multimode(kind);
  return false;
}

const std::vector<std::string_view>& known_keys() {
  static const std::vector<std::string_view> keys{
      "scheme.kind", "label",      "source.nu",  "source.nus",     "source.ladder",
      "source.pump", "psa.g",      "psa.phase",  "psa.ladder",     "psa.pump",
      "loss",        "loss.arm1",  "loss.arm2",  "combiner.gain",  "scheme.port",
      "lo.xi",       "lo.zeta",    "lo.phi0",    "lo.psi0",        "lo.spectra",
      "sweep.param", "sweep.range"};
  return keys;
}

SpectralGrid load_spectra(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument(fmt::format("cannot open spectra file '{}'", path.string()));
  }
  SpectralGrid grid;
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  std::size_t n_modes = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto cells = split(text, ',');
    if (header) {
      header = false;
      if (cells.size() < 9 || (cells.size() - 5) % 4 != 0) {
        throw std::invalid_argument(fmt::format(
            "{}:{}: expected omega, LO A re/im, LO B re/im and re/im pairs for each phi_j then "
            "each psi_j; got {} columns",
            path.string(), lineno, cells.size()));
      }
      n_modes = (cells.size() - 5) / 4;
      grid.modes_a.resize(n_modes);
      grid.modes_b.resize(n_modes);
      continue;
    }
    if (cells.size() != 5 + 4 * n_modes) {
      throw std::invalid_argument(fmt::format("{}:{}: expected {} columns, got {}", path.string(),
                                              lineno, 5 + 4 * n_modes, cells.size()));
    }
    std::vector<double> v;
    for (const auto& c : cells) {
      const auto d = to_double(c);
      if (!d) {
        throw std::invalid_argument(
            fmt::format("{}:{}: '{}' is not a number", path.string(), lineno, c));
      }
      v.push_back(*d);
    }
    grid.omega.push_back(v[0]);
    grid.lo_a.emplace_back(v[1], v[2]);
    grid.lo_b.emplace_back(v[3], v[4]);
    for (std::size_t j = 0; j < n_modes; ++j) {
      grid.modes_a[j].emplace_back(v[5 + 2 * j], v[6 + 2 * j]);
      grid.modes_b[j].emplace_back(v[5 + 2 * n_modes + 2 * j], v[6 + 2 * n_modes + 2 * j]);
    }
  }
  if (header) {
    throw std::invalid_argument(fmt::format("spectra file '{}' is empty", path.string()));
  }
  return grid;
}

LOOverlap overlap_of(const ScenarioConfig& c) {
  LOOverlap lo;
  if (!c.lo_spectra.empty()) {
    const OverlapResult r = overlap_from_spectra(load_spectra(c.lo_spectra));
    lo = r.overlap;
  } else {
    lo.xi = c.lo_xi;
    lo.zeta = c.lo_zeta;
  }
  lo.phi0 = c.lo_phi0;
  lo.psi0 = c.lo_psi0;
  return lo;
}

MultimodeGains source_gains(const ScenarioConfig& c) {
  if (!c.source_nus.empty()) return MultimodeGains::from_strengths(c.source_nus);
  return gains_from_ladder(ModeLadder(c.source_ladder, c.source_pump));
}

ResultRow multimode_row(const ScenarioConfig& c) {
  const MultimodeGains src = source_gains(c);
  const LOOverlap lo = overlap_of(c);
  double value = 0.0;
  ResultRow row;
  if (c.kind == ScenarioKind::multimode_traditional) {
    value = multimode_traditional_I(src, lo);
  } else {
    const ModeLadder psa(c.psa_ladder, c.psa_pump);
    const MultimodeResult r =
        c.kind == ScenarioKind::multimode_psa_joint
            ? multimode_psa_joint_I(src, psa, lo)
            : multimode_psa_single_I(src, psa, lo,
                                     c.port == 2 ? MultimodePort::port2 : MultimodePort::port1);
    value = r.value;
    row.high_gain_flag = r.low_gain;
    row.mode_flag = r.leading_mode_unmatched;
  }
  row.var_x_minus = value;
  row.var_y_plus = value;
  row.snl = 2.0;
  row.nor_x = value / 2.0;
  row.nor_y = value / 2.0;
  row.inseparability = row.nor_x + row.nor_y;
  return row;
}

SchemeSpec scheme_of(const ScenarioConfig& c) {
  SchemeSpec s;
  s.detection_loss = {LossChannel(c.loss_arm1), LossChannel(c.loss_arm2)};
  switch (c.kind) {
    case ScenarioKind::traditional:
      s.kind = SchemeKind::traditional_dual_bhd;
      s.combiner = CombinerConfig{c.combiner_gain, CombinerSign::difference};
      return s;
    case ScenarioKind::psa_power_detector:
      s.kind = SchemeKind::psa_power_detector;
      break;
    case ScenarioKind::psa_joint:
      s.kind = SchemeKind::psa_joint_bhd;
      s.combiner = CombinerConfig{c.combiner_gain, CombinerSign::difference};
      break;
    case ScenarioKind::psa_single:
      s.kind = SchemeKind::psa_single_bhd;
      s.output_port = c.port == 2 ? OutputPort::port2 : OutputPort::port1;
      break;
    default:
      throw std::logic_error("not a single-mode scheme");
  }
  s.psa_gain = GainParam(c.psa_g);
  s.psa_phase = c.psa_phase;
  return s;
}

ResultRow single_mode_row(const ScenarioConfig& c) {
  const SourceSpec src{GainParam(c.nu)};
  ResultRow row;
  MeasurementReport rep;
  if (c.kind == ScenarioKind::source) {
    rep = source_metrics(src);
  } else {
    rep = evaluate_scheme(src, scheme_of(c));
  }
  row.var_x_minus = rep.var_x_minus;
  row.var_y_plus = rep.var_y_plus;
  row.snl = rep.snl;
  row.nor_x = rep.nor_x;
  row.nor_y = rep.nor_y;
  row.inseparability = rep.inseparability;

  GaussianState state = apply_two_mode_pa(vacuum_state(2), 0, 1, src.gain);
  if (uses_psa(c.kind)) {
    state = apply_nondegenerate_psa(state, 0, 1, GainParam(c.psa_g, c.psa_phase));
  }
  if (uses_loss(c.kind)) {
    state = apply_loss(state, 0, LossChannel(c.loss_arm1));
    state = apply_loss(state, 1, LossChannel(c.loss_arm2));
  }
  row.physical = check_physicality(state).ok();

  if (c.kind == ScenarioKind::psa_power_detector) {
    const double asymptote = source_metrics(src).inseparability / 2.0;
    const double ratio = rep.inseparability / 2.0;
    row.high_gain_flag = std::abs(ratio - asymptote) > kPowerDetectorTolerance * asymptote;
  }
  return row;
}

std::string csv_meta(const ScenarioConfig& config, std::string_view description) {
  std::string out = "#";
  if (!description.empty()) out += fmt::format(" curve = {};", description);
  std::istringstream lines(serialize_config(config));
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    out += first ? " " : "; ";
    out += line;
    first = false;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::string source, std::size_t line, std::string key,
                         const std::string& message)
    : std::runtime_error(format_error(source, line, key, message)),
      line_(line),
      key_(std::move(key)) {}

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::source: return "source";
    case ScenarioKind::traditional: return "traditional";
    case ScenarioKind::psa_power_detector: return "psa_power_detector";
    case ScenarioKind::psa_joint: return "psa_joint";
    case ScenarioKind::psa_single: return "psa_single";
    case ScenarioKind::multimode_traditional: return "multimode_traditional";
    case ScenarioKind::multimode_psa_single: return "multimode_psa_single";
    case ScenarioKind::multimode_psa_joint: return "multimode_psa_joint";
  }
  return "unknown";
}

std::optional<ScenarioKind> scenario_kind_from(std::string_view name) {
  for (auto k : {ScenarioKind::source, ScenarioKind::traditional, ScenarioKind::psa_power_detector,
                 ScenarioKind::psa_joint, ScenarioKind::psa_single,
                 ScenarioKind::multimode_traditional, ScenarioKind::multimode_psa_single,
                 ScenarioKind::multimode_psa_joint}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool is_multimode(ScenarioKind kind) {
  return kind == ScenarioKind::multimode_traditional ||
         kind == ScenarioKind::multimode_psa_single || kind == ScenarioKind::multimode_psa_joint;
}

std::vector<double> SweepAxis::values() const {
  std::vector<double> out(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    out[k] = steps == 1 ? start
                        : start + (stop - start) * static_cast<double>(k) /
                                      static_cast<double>(steps - 1);
  }
  return out;
}

const std::vector<std::string_view>& sweepable_parameters() {
  static const std::vector<std::string_view> params{
      "nu",     "g",        "g_over_nu", "loss",        "loss1", "loss2",
      "lambda", "psa_phase", "psa_pump", "source_pump", "phi0",  "psi0"};
  return params;
}

void ScenarioConfig::set_parameter(std::string_view param, double value) {
  if (param == "nu") {
    nu = value;
  } else if (param == "g") {
    psa_g = value;
  } else if (param == "g_over_nu") {
    psa_g = value * nu;
  } else if (param == "loss") {
    loss_arm1 = value;
    loss_arm2 = value;
  } else if (param == "loss1") {
    loss_arm1 = value;
  } else if (param == "loss2") {
    loss_arm2 = value;
  } else if (param == "lambda") {
    combiner_gain = value;
  } else if (param == "psa_phase") {
    psa_phase = value;
  } else if (param == "psa_pump") {
    psa_pump = value;
  } else if (param == "source_pump") {
    source_pump = value;
  } else if (param == "phi0") {
    lo_phi0 = value;
  } else if (param == "psi0") {
    lo_psi0 = value;
  } else {
    throw std::invalid_argument(fmt::format("unknown sweep parameter '{}'", param));
  }
}

ScenarioConfig parse_config(std::string_view text, const std::string& source_name,
                            const std::filesystem::path& base_dir) {
  std::map<std::string, std::pair<std::size_t, std::string>> entries;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source_name, lineno, "", fmt::format("expected 'key = value', got '{}'", line));
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
      throw ConfigError(source_name, lineno, key, "unknown key");
    }
    if (value.empty()) throw ConfigError(source_name, lineno, key, "missing value");
    if (const auto it = entries.find(key); it != entries.end()) {
      throw ConfigError(source_name, lineno, key,
                        fmt::format("duplicate key (first set on line {})", it->second.first));
    }
    entries.emplace(key, std::make_pair(lineno, value));
  }

  auto fail = [&](const std::string& key, const std::string& msg) -> ConfigError {
    const auto it = entries.find(key);
    return ConfigError(source_name, it == entries.end() ? 0 : it->second.first, key, msg);
  };
  auto has = [&](const std::string& key) { return entries.count(key) > 0; };
  auto raw = [&](const std::string& key) -> const std::string& { return entries.at(key).second; };
  auto num = [&](const std::string& key, double& out) {
    if (!has(key)) return;
    const auto v = to_double(raw(key));
    if (!v || std::isnan(*v)) throw fail(key, fmt::format("'{}' is not a number", raw(key)));
    out = *v;
  };
  auto num_list = [&](const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    out.clear();
    for (const auto& part : split(raw(key), ',')) {
      const auto v = to_double(part);
      if (!v || !std::isfinite(*v)) throw fail(key, fmt::format("'{}' is not a number", part));
      out.push_back(*v);
    }
  };
  auto complex_list = [&](const std::string& key, std::vector<Complex>& out) {
    if (!has(key)) return;
    out.clear();
    for (const auto& part : split(raw(key), ',')) {
      const auto v = to_complex(part);
      if (!v) {
        throw fail(key, fmt::format("'{}' is not a complex number (use re, re+imj or mag@phase)",
                                    part));
      }
      out.push_back(*v);
    }
  };

  ScenarioConfig c;
  if (!has("scheme.kind")) throw ConfigError(source_name, 0, "scheme.kind", "required key missing");
  const auto kind = scenario_kind_from(raw("scheme.kind"));
  if (!kind) throw fail("scheme.kind", fmt::format("unknown scheme '{}'", raw("scheme.kind")));
  c.kind = *kind;
  for (const auto& [key, entry] : entries) {
    if (!key_allowed(c.kind, key)) {
      throw ConfigError(source_name, entry.first, key,
                        fmt::format("not used by scheme '{}'", to_string(c.kind)));
    }
  }
  if (has("label")) c.label = raw("label");

  num("source.nu", c.nu);
  num_list("source.nus", c.source_nus);
  num_list("source.ladder", c.source_ladder);
  num("source.pump", c.source_pump);
  num("psa.g", c.psa_g);
  num("psa.phase", c.psa_phase);
  num_list("psa.ladder", c.psa_ladder);
  num("psa.pump", c.psa_pump);
  if (has("loss") && (has("loss.arm1") || has("loss.arm2"))) {
    throw fail("loss", "give either loss or loss.arm1/loss.arm2, not both");
  }
  num("loss", c.loss_arm1);
  num("loss", c.loss_arm2);
  num("loss.arm1", c.loss_arm1);
  num("loss.arm2", c.loss_arm2);
  num("combiner.gain", c.combiner_gain);
  if (has("scheme.port")) {
    if (raw("scheme.port") == "1") {
      c.port = 1;
    } else if (raw("scheme.port") == "2") {
      c.port = 2;
    } else {
      throw fail("scheme.port", "must be 1 or 2");
    }
  }
  complex_list("lo.xi", c.lo_xi);
  complex_list("lo.zeta", c.lo_zeta);
  num("lo.phi0", c.lo_phi0);
  num("lo.psi0", c.lo_psi0);
  if (has("lo.spectra")) {
    std::filesystem::path p(raw("lo.spectra"));
    if (p.is_relative()) p = base_dir / p;
    p = std::filesystem::absolute(p).lexically_normal();
    if (!std::filesystem::exists(p)) {
      throw fail("lo.spectra", fmt::format("file '{}' does not exist", p.string()));
    }
    c.lo_spectra = p.string();
  }

  auto finite_nonneg = [&](const std::string& key, double v) {
    if (!(std::isfinite(v) && v >= 0.0)) throw fail(key, "must be finite and non-negative");
  };
  finite_nonneg("source.nu", c.nu);
  finite_nonneg("psa.g", c.psa_g);
  if (!std::isfinite(c.psa_phase)) throw fail("psa.phase", "must be finite");
  if (!std::isfinite(c.combiner_gain)) throw fail("combiner.gain", "must be finite");
  if (!std::isfinite(c.lo_phi0)) throw fail("lo.phi0", "must be finite");
  if (!std::isfinite(c.lo_psi0)) throw fail("lo.psi0", "must be finite");
  for (const auto& [key, v] : {std::pair<std::string, double>{"loss.arm1", c.loss_arm1},
                               std::pair<std::string, double>{"loss.arm2", c.loss_arm2}}) {
    if (!(v >= 0.0 && v <= 1.0)) throw fail(has("loss") ? "loss" : key, "must lie in [0, 1]");
  }
  if (!(c.source_pump >= 0.0)) throw fail("source.pump", "must be non-negative");
  if (!(c.psa_pump >= 0.0)) throw fail("psa.pump", "must be non-negative");

  if (is_multimode(c.kind)) {
    const bool explicit_nus = has("source.nus");
    const bool ladder = has("source.ladder") || has("source.pump");
    if (explicit_nus == ladder) {
      throw ConfigError(source_name, 0, "source.nus",
                        "give either source.nus or source.ladder with source.pump");
    }
    if (ladder && (!has("source.ladder") || !has("source.pump"))) {
      throw fail(has("source.ladder") ? "source.ladder" : "source.pump",
                 "source.ladder and source.pump go together");
    }
    if (uses_psa_ladder(c.kind) && (!has("psa.ladder") || !has("psa.pump"))) {
      throw ConfigError(source_name, 0, "psa.ladder", "scheme needs psa.ladder and psa.pump");
    }
    const bool inline_lo = has("lo.xi") || has("lo.zeta");
    if (inline_lo == has("lo.spectra")) {
      throw ConfigError(source_name, 0, "lo.xi", "give either lo.xi/lo.zeta or lo.spectra");
    }
    if (inline_lo && (!has("lo.xi") || !has("lo.zeta"))) {
      throw fail(has("lo.xi") ? "lo.xi" : "lo.zeta", "lo.xi and lo.zeta go together");
    }
  }

  if (has("sweep.param") != has("sweep.range")) {
    throw fail(has("sweep.param") ? "sweep.param" : "sweep.range",
               "sweep.param and sweep.range go together");
  }
  if (has("sweep.param")) {
    SweepAxis axis;
    axis.param = raw("sweep.param");
    const auto& params = sweepable_parameters();
    if (std::find(params.begin(), params.end(), axis.param) == params.end()) {
      throw fail("sweep.param", fmt::format("unknown parameter '{}'", axis.param));
    }
    const auto parts = split(raw("sweep.range"), ':');
    if (parts.size() != 3) throw fail("sweep.range", "expected start:stop:steps");
    const auto start = to_double(parts[0]);
    const auto stop = to_double(parts[1]);
    std::size_t steps = 0;
    const auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), steps);
    if (!start || !stop || !std::isfinite(*start) || !std::isfinite(*stop)) {
      throw fail("sweep.range", "bounds must be finite numbers");
    }
    if (ec != std::errc{} || ptr != parts[2].data() + parts[2].size() || steps < 1) {
      throw fail("sweep.range", "steps must be an integer >= 1");
    }
    axis.start = *start;
    axis.stop = *stop;
    axis.steps = steps;
    c.sweep = axis;
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string(), path.parent_path());
}

std::string serialize_config(const ScenarioConfig& c) {
  std::string out;
  auto put = [&](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  auto dbl = [](double v) { return fmt::format("{}", v); };
  put("scheme.kind", std::string(to_string(c.kind)));
  if (!c.label.empty()) put("label", c.label);
  if (!is_multimode(c.kind)) {
    put("source.nu", dbl(c.nu));
  } else if (!c.source_nus.empty()) {
    put("source.nus", join(c.source_nus, dbl));
  } else {
    put("source.ladder", join(c.source_ladder, dbl));
    put("source.pump", dbl(c.source_pump));
  }
  if (uses_psa(c.kind)) {
    put("psa.g", dbl(c.psa_g));
    put("psa.phase", dbl(c.psa_phase));
  }
  if (uses_psa_ladder(c.kind)) {
    put("psa.ladder", join(c.psa_ladder, dbl));
    put("psa.pump", dbl(c.psa_pump));
  }
  if (uses_loss(c.kind)) {
    put("loss.arm1", dbl(c.loss_arm1));
    put("loss.arm2", dbl(c.loss_arm2));
  }
  if (uses_combiner(c.kind)) put("combiner.gain", dbl(c.combiner_gain));
  if (c.kind == ScenarioKind::psa_single || c.kind == ScenarioKind::multimode_psa_single) {
    put("scheme.port", std::to_string(c.port));
  }
  if (is_multimode(c.kind)) {
    if (!c.lo_spectra.empty()) {
      put("lo.spectra", c.lo_spectra);
    } else {
      put("lo.xi", join(c.lo_xi, format_complex));
      put("lo.zeta", join(c.lo_zeta, format_complex));
    }
    put("lo.phi0", dbl(c.lo_phi0));
    put("lo.psi0", dbl(c.lo_psi0));
  }
  if (c.sweep) {
    put("sweep.param", c.sweep->param);
    put("sweep.range", fmt::format("{}:{}:{}", c.sweep->start, c.sweep->stop, c.sweep->steps));
  }
  return out;
}

ResultRow evaluate_point(const ScenarioConfig& config, double x) {
  ResultRow row = is_multimode(config.kind) ? multimode_row(config) : single_mode_row(config);
  row.x = x;
  row.scheme = std::string(to_string(config.kind));
  return row;
}

std::vector<ResultRow> run_scenario(const ScenarioConfig& config) {
  const std::string key = config.sweep ? "sweep.param" : "scheme.kind";
  auto point = [&](double x) {
    ScenarioConfig c = config;
    if (config.sweep) c.set_parameter(config.sweep->param, x);
    c.sweep.reset();
    try {
      return evaluate_point(c, x);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("scenario", 0, key, fmt::format("at {} = {}: {}", key, x, e.what()));
    } catch (const std::domain_error& e) {
      throw ConfigError("scenario", 0, key, fmt::format("at {} = {}: {}", key, x, e.what()));
    }
  };
  if (!config.sweep) return {point(0.0)};

  const std::vector<double> xs = config.sweep->values();
  std::vector<ResultRow> rows(xs.size());
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t begin = 0; begin < xs.size(); begin += workers) {
    const std::size_t end = std::min(xs.size(), begin + workers);
    std::vector<std::future<ResultRow>> batch;
    for (std::size_t k = begin; k < end; ++k) {
      batch.push_back(std::async(std::launch::async, point, xs[k]));
    }
    for (std::size_t k = begin; k < end; ++k) rows[k] = batch[k - begin].get();
  }
  return rows;
}

std::string csv_header(const ScenarioConfig& config) {
  return fmt::format(
      "{},var_x_minus,var_y_plus,snl,nor_x,nor_y,inseparability,scheme,high_gain_flag,mode_flag,"
      "cutoff_flag,physical",
      config.sweep ? config.sweep->param : std::string("point"));
}

std::string format_row(const ResultRow& r) {
  return fmt::format("{:.{}g},{:.{}g},{:.{}g},{:.{}g},{:.{}g},{:.{}g},{:.{}g},{},{:d},{:d},{:d},{:d}",
                     r.x, kCsvDigits, r.var_x_minus, kCsvDigits, r.var_y_plus, kCsvDigits, r.snl,
                     kCsvDigits, r.nor_x, kCsvDigits, r.nor_y, kCsvDigits, r.inseparability,
                     kCsvDigits, r.scheme, static_cast<int>(r.high_gain_flag),
                     static_cast<int>(r.mode_flag), static_cast<int>(r.cutoff_flag),
                     static_cast<int>(r.physical));
}

void write_csv(std::ostream& out, const ScenarioConfig& config, const std::vector<ResultRow>& rows,
               std::string_view description) {
  out << csv_meta(config, description) << '\n' << csv_header(config) << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

CsvData read_csv(std::istream& in) {
  CsvData data;
  std::string line;
  if (!std::getline(in, line) || line.empty() || line.front() != '#') {
    throw std::invalid_argument("CSV must start with a '#' metadata line");
  }
  std::string config_text;
  for (const auto& part : split(std::string_view(line).substr(1), ';')) {
    if (part.empty()) continue;
    if (part.starts_with("curve")) {
      const auto eq = part.find('=');
      if (eq != std::string_view::npos) {
        data.description = std::string(trim(part.substr(eq + 1)));
        continue;
      }
    }
    config_text += std::string(part) + "\n";
  }
  data.config = parse_config(config_text, "csv metadata");
  if (!std::getline(in, line)) throw std::invalid_argument("CSV has no header row");
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 12) {
      throw std::invalid_argument(fmt::format("CSV line {}: expected 12 fields", lineno));
    }
    std::array<double, 7> v{};
    for (std::size_t k = 0; k < v.size(); ++k) {
      const auto d = to_double(cells[k]);
      if (!d) throw std::invalid_argument(fmt::format("CSV line {}: bad number '{}'", lineno, cells[k]));
      v[k] = *d;
    }
    ResultRow r;
    r.x = v[0];
    r.var_x_minus = v[1];
    r.var_y_plus = v[2];
    r.snl = v[3];
    r.nor_x = v[4];
    r.nor_y = v[5];
    r.inseparability = v[6];
    r.scheme = std::string(cells[7]);
    r.high_gain_flag = cells[8] == "1";
    r.mode_flag = cells[9] == "1";
    r.cutoff_flag = cells[10] == "1";
    r.physical = cells[11] == "1";
    data.rows.push_back(std::move(r));
  }
  return data;
}

// ---- figure presets -------------------------------------------------------

namespace {

ScenarioConfig swept(ScenarioKind kind, double nu, std::string param, double start, double stop,
                     std::size_t steps) {
  ScenarioConfig c;
  c.kind = kind;
  c.nu = nu;
  c.psa_phase = kPi;
  c.sweep = SweepAxis{std::move(param), start, stop, steps};
  return c;
}

Curve make_curve(std::string name, std::string description, ScenarioConfig config) {
  config.label = name;
  Curve curve{std::move(name), std::move(description), std::move(config), {}};
  curve.rows = run_scenario(curve.config);
  return curve;
}

std::vector<Curve> ent_vs_gain(const std::string& param, double stop, std::size_t steps) {
  const std::array<std::pair<const char*, double>, 3> sources{
      {{"i", 0.3}, {"ii", 0.6}, {"iii", 2.0}}};
  std::vector<Curve> curves;
  for (const auto& [tag, nu] : sources) {
    curves.push_back(make_curve(
        tag, fmt::format("single-BHD normalized noise behind the PSA, nu = {}", nu),
        swept(ScenarioKind::psa_single, nu, param, 0.0, stop, steps)));
  }
  for (const auto& [tag, nu] : sources) {
    curves.push_back(make_curve(fmt::format("ref_{}", tag),
                                fmt::format("source noise level, nu = {}", nu),
                                swept(ScenarioKind::source, nu, param, 0.0, stop, steps)));
  }
  curves.push_back(make_curve("snl", "shot-noise level",
                              swept(ScenarioKind::source, 0.0, param, 0.0, stop, steps)));
  return curves;
}

std::vector<Curve> loss_curves(ScenarioKind kind, std::span<const double> gains, bool with_source) {
  std::vector<Curve> curves;
  for (double g : gains) {
    ScenarioConfig c = swept(kind, 2.0, "loss", 0.0, 0.6, 61);
    c.psa_g = g;
    curves.push_back(make_curve(fmt::format("g{}", g),
                                fmt::format("inseparability versus detection loss, g = {}", g),
                                std::move(c)));
  }
  if (with_source) {
    curves.push_back(make_curve("ref_Is", "lossless source inseparability I_s",
                                swept(ScenarioKind::source, 2.0, "loss", 0.0, 0.6, 61)));
  }
  return curves;
}

}  // namespace

const std::vector<std::string_view>& figure_preset_names() {
  static const std::vector<std::string_view> names{"ent_vs_gain_a", "ent_vs_gain_ratio_b",
                                                   "loss_jm_a", "loss_single_b"};
  return names;
}

std::vector<Curve> figure_preset(std::string_view name) {
  if (name == "ent_vs_gain_a") return ent_vs_gain("g", 6.0, 121);
  if (name == "ent_vs_gain_ratio_b") return ent_vs_gain("g_over_nu", 4.0, 161);
  if (name == "loss_jm_a") {
    const std::array<double, 4> gains{0.0, 2.0, 3.0, 5.0};
    return loss_curves(ScenarioKind::psa_joint, gains, false);
  }
  if (name == "loss_single_b") {
    const std::array<double, 3> gains{2.0, 3.0, 5.0};
    return loss_curves(ScenarioKind::psa_single, gains, true);
  }
  throw std::invalid_argument(fmt::format("unknown figure preset '{}' (known: {})", name,
                                          fmt::format("{}", fmt::join(figure_preset_names(), ", "))));
}

}  // namespace cvent::runner
