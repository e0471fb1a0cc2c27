#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclequeue/report.hpp"

namespace cq::cli {

// Malformed invocation: unknown command, flag, or config key, broken JSON,
// or a verify run without a seed. The main wrapper prints the message plus
// the usage text and exits 2. Bad parameter *values* (theta <= 0, ...) are
// std::domain_error instead and exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string command;
  std::map<std::string, double> params;  // theta mu rho k c t_end n_reps
  std::optional<std::uint64_t> seed;     // absent: analytic-only rows
  std::vector<double> checkpoints;       // tandem observation times
  std::string quantity;                  // row-group filter (walk, busy)
  std::string output_path;               // empty: csv to stdout

  double get(const std::string& key, double fallback) const;
};

// args excludes the program name. A JSON file named by --config merges
// under the flags: flags win key by key.
ExperimentConfig parse_config(const std::vector<std::string>& args);

// Analytic rows always; Monte Carlo columns only when a seed is present.
// Row-group seeds are derived from the master seed by fixed stream indices,
// so a filtered run reproduces the full run's numbers.
std::vector<report::ReportRow> build_rows(const ExperimentConfig& config);

// Builds the rows and writes the report (csv to stdout, or csv + json
// mirror under --output). Returns 0 iff every pass flag holds.
int run(const ExperimentConfig& config);

std::string usage_text();

// argv entry point: usage errors exit 2, value and numeric errors exit 1.
int main(int argc, const char* const* argv);

}  // namespace cq::cli
