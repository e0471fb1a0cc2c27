#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// Report rows shared by the CLI commands: each row pairs an analytic value
// with an optional Monte Carlo estimate and a literature anchor naming the
// result it instantiates. Serialization is locale-free, 12 significant
// digits, so equal configs and seeds give byte-identical files.

namespace cq::report {

struct ReportRow {
  std::string quantity;
  std::optional<double> analytic;
  std::optional<double> mc_mean;
  std::optional<double> mc_stderr;
  std::string target_ref;       // anchor such as "takacs-lt"; nonempty
                                // whenever analytic is present
  std::optional<bool> pass;
};

// 12 significant digits through std::to_chars: no locale, no trailing-zero
// jitter.
std::string format_number(double v);

// Header is exactly quantity,analytic,mc_mean,mc_stderr,target_ref,pass;
// absent optionals serialize as empty fields. A row with neither analytic
// nor mc_mean is rejected (std::invalid_argument), as is a comma inside a
// string field.
void write_csv(std::ostream& os, const std::vector<ReportRow>& rows);

// JSON mirror: {"schema": 1, "rows": [...]} with null for absent values,
// key order fixed.
void write_json(std::ostream& os, const std::vector<ReportRow>& rows);

// True when every present pass flag is true (rows without a flag do not
// veto). This is the CLI's exit-status predicate.
bool all_pass(const std::vector<ReportRow>& rows);

}  // namespace cq::report
