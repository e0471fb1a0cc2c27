#include "cyclequeue/report.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>
#include <system_error>

#include "json.hpp"

namespace cq::report {

namespace {

void check_row(const ReportRow& row) {
  if (!row.analytic && !row.mc_mean)
    throw std::invalid_argument("report: row '" + row.quantity +
                                "' carries neither analytic nor mc_mean");
  if (row.quantity.find(',') != std::string::npos ||
      row.target_ref.find(',') != std::string::npos)
    throw std::invalid_argument("report: comma in a string field of '" +
                                row.quantity + "'");
}

}  // namespace

std::string format_number(double v) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 12);
  if (res.ec != std::errc{})
    throw std::runtime_error("report: number formatting failed");
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << "quantity,analytic,mc_mean,mc_stderr,target_ref,pass\n";
  for (const auto& row : rows) {
    check_row(row);
    os << row.quantity << ',';
    if (row.analytic) os << format_number(*row.analytic);
    os << ',';
    if (row.mc_mean) os << format_number(*row.mc_mean);
    os << ',';
    if (row.mc_stderr) os << format_number(*row.mc_stderr);
    os << ',' << row.target_ref << ',';
    if (row.pass) os << (*row.pass ? "true" : "false");
    os << '\n';
  }
}

void write_json(std::ostream& os, const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json doc;
  doc["schema"] = 1;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    check_row(row);
    nlohmann::ordered_json r;
    r["quantity"] = row.quantity;
    r["analytic"] = row.analytic ? nlohmann::ordered_json(*row.analytic)
                                 : nlohmann::ordered_json(nullptr);
    r["mc_mean"] = row.mc_mean ? nlohmann::ordered_json(*row.mc_mean)
                               : nlohmann::ordered_json(nullptr);
    r["mc_stderr"] = row.mc_stderr ? nlohmann::ordered_json(*row.mc_stderr)
                                   : nlohmann::ordered_json(nullptr);
    r["target_ref"] = row.target_ref;
    r["pass"] = row.pass ? nlohmann::ordered_json(*row.pass)
                         : nlohmann::ordered_json(nullptr);
    doc["rows"].push_back(std::move(r));
  }
  os << doc.dump(2) << '\n';
}

bool all_pass(const std::vector<ReportRow>& rows) {
  for (const auto& row : rows)
    if (row.pass && !*row.pass) return false;
  return true;
}

}  // namespace cq::report
