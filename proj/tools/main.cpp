#include <cvf/runner.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"pointwise verification of conformal vector fields of (alpha,beta)-metric spaces"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "run the checks selected by a JSON configuration");
  std::string config_path;
  verify->add_option("config", config_path, "path to the run configuration")->required();
  std::optional<int> samples;
  verify->add_option("--samples", samples, "override the number of sample points");
  std::optional<std::uint64_t> seed;
  verify->add_option("--seed", seed, "override the sampling seed");
  std::optional<double> tol;
  verify->add_option("--tol", tol, "override the default verdict tolerance");
  std::optional<std::string> report;
  verify->add_option("--report", report, "override the JSON report path");
  std::optional<std::string> scheme;
  verify->add_option("--scheme", scheme, "differentiation scheme")
      ->check(CLI::IsMember({"central2", "central4"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  try {
    cvf::RunConfig rc = cvf::load_run_config(config_path);
    if (samples) {
      if (*samples < 1) throw cvf::ConfigError("--samples must be >= 1");
      rc.samples = *samples;
    }
    if (seed) rc.seed = *seed;
    if (tol) {
      if (!(*tol > 0)) throw cvf::ConfigError("--tol must be positive");
      rc.tol_default = *tol;
    }
    if (report) rc.report_path = *report;
    if (scheme)
      rc.scheme = *scheme == "central2" ? cvf::Scheme::Central2 : cvf::Scheme::Central4;
    return cvf::execute(rc, std::cout);
  } catch (const cvf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  }
}
