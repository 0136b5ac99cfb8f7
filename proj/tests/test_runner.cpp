#include <doctest.h>

#include <cvf/runner.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "helpers.hpp"

using namespace cvf;
using namespace cvftest;

namespace {

const char* kDilation = R"({
  "scenario": {"type": "builtin", "name": "flat+const-b+dilation", "params": {"n": 2, "lambda": 0.8}},
  "checks": ["theorem1"],
  "samples": 12,
  "seed": 7
})";

std::string strip_timestamp(const std::string& report_json) {
  return std::regex_replace(report_json, std::regex("\"generated_at\": \"[^\"]*\""),
                            "\"generated_at\": \"\"");
}

const CheckResult& find_check(const VerificationReport& rep, const std::string& tag) {
  for (const CheckResult& c : rep.checks)
    if (c.tag == tag) return c;
  REQUIRE(false);
  return rep.checks.front();
}

}  // namespace

TEST_CASE("check tags are sorted and the parser enforces them") {
  const auto& tags = check_tags();
  CHECK(tags.size() == 16);
  CHECK(std::is_sorted(tags.begin(), tags.end()));
  CHECK(std::binary_search(tags.begin(), tags.end(), "theorem1"));
  CHECK(std::binary_search(tags.begin(), tags.end(), "ode-y42"));
}

TEST_CASE("config parsing rejects malformed documents") {
  auto reject = [](const std::string& text) {
    CHECK_THROWS_AS(parse_run_config(text), ConfigError);
  };

  reject("{nope");
  reject("[]");
  reject(R"({"checks": ["closed"]})");                                     // missing scenario
  reject(R"({"scenario": {"type": "builtin", "name": "flat-euclidean"}})");  // missing checks
  reject(R"({"scenario": {"type": "builtin", "name": "flat-euclidean"}, "checks": []})");
  reject(R"({"scenario": {"type": "orbit"}, "checks": ["closed"]})");
  reject(R"({"scenario": {"type": "builtin", "name": "flat-euclidean"}, "checks": ["theorem3"]})");
  reject(R"({"scenario": {"type": "builtin", "name": "flat-euclidean"}, "checks": ["closed"], "bogus": 1})");
  reject(R"({"scenario": {"type": "builtin", "name": "flat-euclidean"}, "checks": ["closed"], "samples": 0})");
  reject(R"({"scenario": {"type": "builtin", "name": "flat-euclidean"}, "checks": ["closed"], "rays": 0})");
  reject(R"({"scenario": {"type": "builtin", "name": "flat-euclidean"}, "checks": ["closed"], "seed": -5})");
  reject(R"({"scenario": {"type": "builtin", "name": "flat-euclidean"}, "checks": ["closed"], "scheme": "central9"})");
  reject(R"({"scenario": {"type": "builtin", "name": "flat-euclidean"}, "checks": ["closed"], "tolerance": 0})");
  reject(R"({"scenario": {"type": "builtin", "name": "flat-euclidean"}, "checks": ["closed"], "tolerances": {"theorem3": 1e-6}})");
  reject(R"({"scenario": {"type": "builtin", "name": "flat-euclidean"}, "checks": ["closed"], "tolerances": {"closed": -1e-6}})");
  reject(R"({"scenario": {"type": "builtin", "name": "flat-euclidean", "extra": 1}, "checks": ["closed"]})");

  // Inline scenarios validate their component tables.
  reject(R"({"scenario": {"type": "inline", "dim": 2, "metric": [[1, 0]], "one_form": [0, 0], "field": [0, 0]}, "checks": ["closed"]})");
  reject(R"({"scenario": {"type": "inline", "dim": 1, "metric": [[1]], "one_form": [0], "field": [0]}, "checks": ["closed"]})");

  // Scenario feasibility is checked at parse time too. Variant B needs tau = 0.
  reject(R"({"scenario": {"type": "example1", "mu": 1.0, "tau": 0.5, "gamma": [1, 0], "eta": [0, 1], "variant": "B"}, "checks": ["theorem1"]})");
}

TEST_CASE("checks are sorted and deduplicated") {
  RunConfig rc = parse_run_config(
      R"({"scenario": {"type": "builtin", "name": "flat-euclidean"},
          "checks": ["killing", "closed", "killing", "einstein"]})");
  CHECK(rc.checks == std::vector<std::string>{"closed", "einstein", "killing"});
}

TEST_CASE("inline scenarios round-trip the coefficient table syntax") {
  RunConfig rc = parse_run_config(R"({
    "scenario": {
      "type": "inline",
      "name": "rational-b",
      "dim": 2,
      "metric": [[1, 0], [0, {"num": [[2, [0, 0]]], "den": [[2, [0, 0]]]}]],
      "one_form": [{"num": [[1, [2, 0]]], "den": [[1, [0, 0]], [1, [2, 0]]]}, 0],
      "field": [[[0.8, [1, 0]]], 0],
      "domain": {"lower": [-0.4, -0.3], "upper": [0.4, 0.3]}
    },
    "checks": ["closed"]
  })");

  const Vector x = vec({0.5, 0.2});
  Matrix a = rc.scenario.a.value(x);
  CHECK(a(0, 0) == doctest::Approx(1.0));
  CHECK(a(1, 1) == doctest::Approx(1.0));
  CHECK(a(0, 1) == 0.0);

  Vector b = rc.scenario.b.value(x);
  CHECK(b[0] == doctest::Approx(0.25 / 1.25));  // x1^2 / (1 + x1^2)
  CHECK(b[1] == 0.0);

  Vector v = rc.scenario.V.value(x);
  CHECK(v[0] == doctest::Approx(0.4));
  CHECK(v[1] == 0.0);

  CHECK(rc.scenario.domain.lower[0] == doctest::Approx(-0.4));
  CHECK(rc.scenario.domain.upper[1] == doctest::Approx(0.3));
  CHECK(rc.scenario.name == "rational-b");
}

TEST_CASE("tolerance resolution: override beats default beats built-in") {
  RunConfig rc = parse_run_config(kDilation);

  CHECK(effective_tolerance(rc, "theorem1") == doctest::Approx(1e-6));
  CHECK(effective_tolerance(rc, "ode-y42") == doctest::Approx(1e-10));
  CHECK(effective_tolerance(rc, "vcb2") == doctest::Approx(1e-8));
  CHECK(effective_tolerance(rc, "einstein") == doctest::Approx(1e-4));
  CHECK(effective_tolerance(rc, "example1-full") == doctest::Approx(1e-5));

  rc.scheme = Scheme::Central2;
  CHECK(effective_tolerance(rc, "theorem1") == doctest::Approx(1e-4));
  CHECK(effective_tolerance(rc, "vcb2") == doctest::Approx(1e-4));
  CHECK(effective_tolerance(rc, "einstein") == doctest::Approx(1e-2));
  CHECK(effective_tolerance(rc, "ode-y42") == doctest::Approx(1e-10));

  rc.tol_default = 5e-3;
  CHECK(effective_tolerance(rc, "theorem1") == doctest::Approx(5e-3));
  CHECK(effective_tolerance(rc, "ode-y42") == doctest::Approx(5e-3));

  rc.tol_overrides["theorem1"] = 7e-9;
  CHECK(effective_tolerance(rc, "theorem1") == doctest::Approx(7e-9));
  CHECK(effective_tolerance(rc, "vcb2") == doctest::Approx(5e-3));
}

TEST_CASE("a homothety scenario passes theorem1 with the expected factor") {
  VerificationReport rep = run(parse_run_config(kDilation));
  CHECK(rep.overall_pass);
  CHECK(rep.exit_code() == 0);

  const CheckResult& c = find_check(rep, "theorem1");
  CHECK(c.pass);
  CHECK(c.points == 12);
  REQUIRE(c.fitted.count("c") == 1);
  for (double v : c.fitted.at("c")) CHECK(v == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(c.note.find("homothetic") != std::string::npos);
}

TEST_CASE("reports are deterministic up to the timestamp") {
  RunConfig rc = parse_run_config(kDilation);
  VerificationReport r1 = run(rc);
  VerificationReport r2 = run(rc);
  CHECK(strip_timestamp(r1.to_json()) == strip_timestamp(r2.to_json()));
}

TEST_CASE("adding a check does not change another check's content") {
  RunConfig lone = parse_run_config(kDilation);
  RunConfig both = parse_run_config(kDilation);
  both.checks = {"closed", "killing", "theorem1"};

  VerificationReport rl = run(lone);
  VerificationReport rb = run(both);
  const CheckResult& a = find_check(rl, "theorem1");
  const CheckResult& b = find_check(rb, "theorem1");
  CHECK(a.pass == b.pass);
  CHECK(a.residual_max == b.residual_max);
  CHECK(a.residual_mean == b.residual_mean);
  CHECK(a.points == b.points);
  CHECK(a.fitted == b.fitted);
  CHECK(a.metrics == b.metrics);
}

TEST_CASE("failures and warnings map onto the exit code") {
  SUBCASE("a non-conformal field fails") {
    VerificationReport rep = run(parse_run_config(R"({
      "scenario": {"type": "builtin", "name": "flat+const-b+moebius", "params": {"n": 2}},
      "checks": ["theorem1"],
      "samples": 15,
      "seed": 3
    })"));
    CHECK_FALSE(rep.overall_pass);
    CHECK(rep.exit_code() == 1);
    CHECK(find_check(rep, "theorem1").residual_max >= 1e-2);
  }

  SUBCASE("rank-deficient fits pass with warnings") {
    VerificationReport rep = run(parse_run_config(R"({
      "scenario": {
        "type": "inline",
        "name": "flat-zero-b",
        "dim": 2,
        "metric": [[1, 0], [0, 1]],
        "one_form": [0, 0],
        "field": [[[0.8, [1, 0]]], [[0.8, [0, 1]]]],
        "phi": {"family": "exp", "eps": 1}
      },
      "checks": ["theorem2-exp"],
      "samples": 10,
      "seed": 5
    })"));
    CHECK(rep.overall_pass);
    CHECK(rep.has_warnings);
    CHECK(rep.exit_code() == 2);
    CHECK_FALSE(find_check(rep, "theorem2-exp").warnings.empty());
  }
}

TEST_CASE("the example reproduction check reports the homothety verdict") {
  VerificationReport rep = run(parse_run_config(R"({
    "scenario": {"type": "example1", "n": 2, "mu": 1.0, "tau": 0.0,
                 "gamma": [1.0, 0.0], "eta": [0.0, 1.0], "variant": "B"},
    "checks": ["example1-full"],
    "samples": 20,
    "rays": 4,
    "seed": 11
  })"));
  CHECK(rep.overall_pass);
  const CheckResult& c = find_check(rep, "example1-full");
  CHECK(c.pass);
  CHECK(c.note.find("non-homothetic (expected non-homothetic)") != std::string::npos);
  CHECK(c.metrics.at("homothetic") == 0.0);
}

TEST_CASE("execute writes the report file and returns the exit code") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "cvf_runner_report_test.json";
  std::error_code ec;
  fs::remove(path, ec);

  RunConfig rc = parse_run_config(kDilation);
  rc.report_path = path.string();
  std::ostringstream out;
  CHECK(execute(rc, out) == 0);
  CHECK(out.str().find("theorem1") != std::string::npos);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("\"tool\": \"cvf\"") != std::string::npos);
  CHECK(ss.str().find("\"overall\"") != std::string::npos);
  fs::remove(path, ec);
}

TEST_CASE("config files load from disk") {
  RunConfig rc = load_run_config(std::string(CVF_TEST_DATA_DIR) + "/dilation.json");
  CHECK(rc.samples == 25);
  CHECK(rc.seed == 7);
  CHECK(rc.checks.size() == 5);
  CHECK_THROWS_AS(load_run_config(std::string(CVF_TEST_DATA_DIR) + "/does_not_exist.json"),
                  ConfigError);
}
