#pragma once

#include <cvf/catalog.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>

namespace cvf {

// Tags of the available checks, sorted. The config parser rejects anything
// else up front.
const std::vector<std::string>& check_tags();

struct RunConfig {
  Scenario scenario;
  std::vector<std::string> checks;    // sorted, deduplicated
  int samples = 100;                  // base points in the domain box
  int rays = 8;                       // tangent rays per point, where a check uses rays
  std::uint64_t seed = 1;
  Scheme scheme = Scheme::AnalyticWhenAvailable;
  std::optional<double> tol_default;  // overrides the per-check built-in defaults
  std::map<std::string, double> tol_overrides;
  std::string report_path;            // empty: no file written
};

// Per-check override if present, else the config-wide default, else the
// check's built-in default under the given scheme.
double effective_tolerance(const RunConfig& rc, const std::string& tag);

// Parse the JSON configuration document. Unknown fields, unknown check tags,
// and infeasible scenario parameters are all rejected here with a ConfigError
// naming the offending entry; nothing is sampled yet.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

struct CheckResult {
  std::string tag;
  bool pass = false;
  double tolerance = 0;
  double residual_max = 0;
  double residual_mean = 0;
  int points = 0;
  std::map<std::string, std::vector<double>> fitted;  // per-point scalars
  std::map<std::string, double> metrics;
  std::vector<std::string> warnings;  // reduced-rank fits, low-confidence curvature
  std::string error;                  // nonempty when the check aborted; counts as failure
  std::string note;
};

struct VerificationReport {
  std::string scenario_name;
  int dim = 0;
  std::string phi_name;
  std::uint64_t seed = 0;
  int samples = 0;
  int rays = 0;
  std::string scheme;
  std::optional<double> tol_default;
  std::map<std::string, double> tol_overrides;
  // Factor convention the fitted scalars are reported under.
  std::string convention = "V^c(F) = 2 c F";
  std::string timestamp;          // excluded from determinism comparisons
  std::vector<CheckResult> checks;  // sorted by tag
  bool overall_pass = false;
  bool has_warnings = false;

  int exit_code() const;        // 0 pass, 2 pass with warnings, 1 any failure
  std::string to_json() const;  // stable key order, trailing newline
  std::string summary_text() const;
};

// Samples points from the seed and executes the selected checks. Each check
// draws rays from its own tag-derived stream, so one check's content never
// depends on which other checks were selected. Exceptions escape only for
// defects that invalidate the run as a whole (unsamplable domain); per-check
// failures land in the report.
VerificationReport run(const RunConfig& config);

// run() plus the side effects: prints the text summary to `out`, writes the
// JSON report when a path is configured, returns the process exit code.
int execute(const RunConfig& config, std::ostream& out);

}  // namespace cvf
