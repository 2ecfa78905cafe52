#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qmarkov/serialize.hpp"

namespace qmarkov::cli {

enum class Format { Text, Json };

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kParseFailure = 2,
  kToleranceBreakdown = 3,
};

int exit_code_for(ErrorKind kind);

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"analyze", "classify", "riesz",     "idempotent",
                                          "poisson", "holevo",   "classical", "crosscheck"};
  return c;
}

struct AnalysisRequest {
  std::string command;
  /// Input document path; ignored when `document` is set.
  std::string input_path;
  /// Already-read input (stdin mode).
  std::optional<std::string> document;
  std::optional<double> tol;
  Format format = Format::Text;
  std::optional<std::string> projection_path;
  std::optional<std::string> element_path;
  std::optional<int> power;
};

struct ReportError {
  std::string kind;
  std::string message;
  bool operator==(const ReportError&) const = default;
};

struct AnalysisReport {
  std::string command;
  std::string input;
  int exit_code = kOk;
  std::optional<ReportError> error;
  nlohmann::json results = nlohmann::json::object();
  /// Named residuals backing the numeric claims in `results`.
  std::map<std::string, double> residuals;
  std::vector<std::string> warnings;

  bool operator==(const AnalysisReport&) const = default;
};

/// Never throws: every failure is folded into the report and its exit code.
AnalysisReport run(const AnalysisRequest& request);

/// Runs `request` once per *.json file of `dir` (sorted by name),
/// concurrently. Returns the reports in file order.
std::vector<AnalysisReport> run_batch(const AnalysisRequest& request, const std::string& dir);

nlohmann::json to_json(const AnalysisReport& r);
AnalysisReport report_from_json(const nlohmann::json& j);

std::string emit(const AnalysisReport& r, Format f);
/// Inverse of emit(r, Format::Json). Throws Error(ParseError).
AnalysisReport parse_report(const std::string& text);

}  // namespace qmarkov::cli
