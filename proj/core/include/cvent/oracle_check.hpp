// Cross-validation of the covariance-matrix code against the Fock-basis oracle.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cvent::runner {

struct OracleCheckOptions {
  double max_strength = 0.8;  // largest squeeze strength used by any case
  std::size_t n_max = 40;
  double tolerance = 1e-6;
};

struct OracleComparison {
  std::string case_name;
  std::string quantity;
  double gaussian = 0.0;
  double oracle = 0.0;
  bool cutoff = false;  // oracle refused: too much weight at the cutoff
  std::string error;
  bool passed = false;

  double difference() const;
};

struct OracleCheckReport {
  std::vector<OracleComparison> rows;
  double seconds = 0.0;

  bool passed() const;
};

/// Throws std::invalid_argument for a non-positive strength or n_max < 2.
OracleCheckReport run_oracle_check(const OracleCheckOptions& options = {});

std::string format_report(const OracleCheckReport& report, const OracleCheckOptions& options);

}  // namespace cvent::runner
