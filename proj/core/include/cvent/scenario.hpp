// Scenario files, parameter sweeps and CSV output for the cvent tool.
//
// A scenario file is line-oriented `dotted.key = value` text; `#` starts a
// comment. See README.md for the full key list.

#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cvent::runner {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, std::size_t line, std::string key, const std::string& message);

  std::size_t line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

enum class ScenarioKind {
  source,  // ideal lossless dual-BHD reading of the source, ignores loss and PSA
  traditional,
  psa_power_detector,
  psa_joint,
  psa_single,
  multimode_traditional,
  multimode_psa_single,
  multimode_psa_joint,
};

std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> scenario_kind_from(std::string_view name);
bool is_multimode(ScenarioKind kind);

struct SweepAxis {
  std::string param;
  double start = 0.0;
  double stop = 0.0;
  std::size_t steps = 1;

  std::vector<double> values() const;

  bool operator==(const SweepAxis&) const = default;
};

/// Names accepted by sweep.param.
const std::vector<std::string_view>& sweepable_parameters();

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::traditional;
  std::string label;

  // Single-mode source strength nu.
  double nu = 0.0;
  // Multimode source: explicit strengths nu_j, or a Schmidt ladder.
  std::vector<double> source_nus;
  std::vector<double> source_ladder;
  double source_pump = 0.0;

  double psa_g = 0.0;
  double psa_phase = 3.141592653589793;
  std::vector<double> psa_ladder;
  double psa_pump = 0.0;

  double loss_arm1 = 0.0;
  double loss_arm2 = 0.0;
  double combiner_gain = 1.0;
  int port = 1;

  std::vector<std::complex<double>> lo_xi;
  std::vector<std::complex<double>> lo_zeta;
  double lo_phi0 = 0.0;
  double lo_psi0 = 0.0;
  std::string lo_spectra;  // spectra CSV; absolute once parsed

  std::optional<SweepAxis> sweep;

  /// Sets one named sweepable parameter.
  void set_parameter(std::string_view param, double value);

  bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig parse_config(std::string_view text, const std::string& source_name = "config",
                            const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical `key = value` lines; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

struct ResultRow {
  double x = 0.0;
  double var_x_minus = 0.0;
  double var_y_plus = 0.0;
  double snl = 0.0;
  double nor_x = 0.0;
  double nor_y = 0.0;
  double inseparability = 0.0;
  std::string scheme;
  bool high_gain_flag = false;  // large-gain approximation not trustworthy
  bool mode_flag = false;       // multimode: LO misses the leading mode
  bool cutoff_flag = false;     // oracle result refused at the Fock cutoff
  bool physical = true;         // final Gaussian state passes the uncertainty check

  bool flagged() const { return high_gain_flag || mode_flag || cutoff_flag || !physical; }
};

/// One row per sweep point (a single row without a sweep), in sweep order.
std::vector<ResultRow> run_scenario(const ScenarioConfig& config);

/// Row for the config exactly as given (no sweep applied).
ResultRow evaluate_point(const ScenarioConfig& config, double x);

inline constexpr int kCsvDigits = 12;

std::string csv_header(const ScenarioConfig& config);
std::string format_row(const ResultRow& row);
void write_csv(std::ostream& out, const ScenarioConfig& config, const std::vector<ResultRow>& rows,
               std::string_view description = {});

struct CsvData {
  ScenarioConfig config;
  std::string description;
  std::vector<ResultRow> rows;
};

/// Reads a file produced by write_csv, including the embedded configuration.
CsvData read_csv(std::istream& in);

// ---- figure presets -------------------------------------------------------

struct Curve {
  std::string name;
  std::string description;
  ScenarioConfig config;
  std::vector<ResultRow> rows;
};

const std::vector<std::string_view>& figure_preset_names();

/// Throws std::invalid_argument for an unknown preset.
std::vector<Curve> figure_preset(std::string_view name);

}  // namespace cvent::runner
