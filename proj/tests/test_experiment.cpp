#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mhcap/experiment.hpp"

using namespace mhcap;
using namespace mhcap::cli;

namespace {
RunConfig small_cfg() {
  RunConfig cfg;
  cfg.trials = 200;
  cfg.x_max = 500.0;
  cfg.x_step = 250.0;
  return cfg;
}
}  // namespace

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(250.0) == "250");
  CHECK(format_double(2.718281828459045) == "2.718281828459045");
  double v = 0.3004113235652410;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("grid construction and validation") {
  RunConfig cfg;
  cfg.x_max = 1250;
  cfg.x_step = 125;
  auto g = cfg.x_grid();
  CHECK(g.size() == 10);
  CHECK(g.front() == 125.0);
  CHECK(g.back() == 1250.0);
  cfg.x_step = 0.0;
  CHECK_THROWS_AS(cfg.x_grid(), std::invalid_argument);
  RunConfig r;
  CHECK(r.rate_grid().size() == 20);
  r.rates = {-5.0};
  CHECK_THROWS_AS(r.rate_grid(), std::invalid_argument);
}

TEST_CASE("hopcurve command emits a well-formed deterministic CSV") {
  auto cfg = small_cfg();
  std::ostringstream out1, out2, err;
  CHECK(cmd_hopcurve(cfg, out1, err) == 0);
  CHECK(cmd_hopcurve(cfg, out2, err) == 0);
  CHECK(out1.str() == out2.str());
  std::istringstream in(out1.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# mhcap hopcurve", 0) == 0);
  CHECK(line.find("seed=1") != std::string::npos);
  std::getline(in, line);
  CHECK(line ==
        "x_m,analytic_exact,analytic_approx,gamma_baseline,mc_mean,mc_stderr,trials,censored");
  std::getline(in, line);
  CHECK(line.rfind("250,2.718281828459045,", 0) == 0);
}

TEST_CASE("usage errors exit with code 2 and leave no file behind") {
  auto cfg = small_cfg();
  cfg.r_i = 100.0;  // violates r_tx <= r_i
  std::ostringstream out, err;
  CHECK(cmd_hopcurve(cfg, out, err) == 2);
  CHECK(err.str().find("usage error") != std::string::npos);

  auto bad = small_cfg();
  bad.output_path = "/nonexistent-dir/x.csv";
  std::ostringstream out2, err2;
  CHECK(cmd_hopcurve(bad, out2, err2) == 1);
  std::ifstream probe(bad.output_path);
  CHECK_FALSE(probe.good());
}

TEST_CASE("file output matches stream output byte for byte") {
  auto cfg = small_cfg();
  cfg.output_path = "test_experiment_tmp.csv";
  std::ostringstream out, err;
  CHECK(cmd_hopcurve(cfg, out, err) == 0);
  std::ifstream f(cfg.output_path, std::ios::binary);
  std::stringstream file_body;
  file_body << f.rdbuf();
  auto cfg2 = small_cfg();
  std::ostringstream direct;
  CHECK(cmd_hopcurve(cfg2, direct, err) == 0);
  CHECK(file_body.str() == direct.str());
  std::remove(cfg.output_path.c_str());
}

TEST_CASE("throughput command reports the fixed-point footer") {
  RunConfig cfg;
  cfg.experiment = Experiment::Throughput;
  cfg.trials = 100;
  cfg.rates = {0.05e6, 0.2e6, 0.5e6};
  std::ostringstream out, err;
  CHECK(cmd_throughput(cfg, out, err) == 0);
  auto body = out.str();
  CHECK(body.find("r_bps,x_airtime,p_col,t_perfect_bps,t_mac_bps,beyond_validity_flag") !=
        std::string::npos);
  // Identity row below capacity: throughput equals the offered rate.
  CHECK(body.find("\n50000,") != std::string::npos);
  CHECK(body.find(",50000,0\n") != std::string::npos);
  auto pos = body.find("t_max_perfect_bps=");
  REQUIRE(pos != std::string::npos);
  double tmax = std::stod(body.substr(pos + 18));
  CHECK(tmax == doctest::Approx(165109.99189888613).epsilon(1e-9));
  auto rpos = body.find("fixed_point_residual=");
  REQUIRE(rpos != std::string::npos);
  CHECK(std::stod(body.substr(rpos + 21)) < 1e-9);
  // Over-driven rows carry the flag.
  CHECK(body.find(",1\n") != std::string::npos);
}

TEST_CASE("moments command emits empirical and analytic columns") {
  RunConfig cfg;
  cfg.experiment = Experiment::Moments;
  cfg.trials = 5000;
  std::ostringstream out, err;
  CHECK(cmd_moments(cfg, out, err) == 0);
  CHECK(out.str().find("analytic_mean") != std::string::npos);
  CHECK(out.str().find("125,") != std::string::npos);  // uniform mean R/2
}

TEST_CASE("2-D hopcurve leaves the exact and baseline columns empty") {
  RunConfig cfg;
  cfg.dim = 2;
  cfg.lambda = 3e-4;
  cfg.trials = 150;
  cfg.x_max = 500.0;
  cfg.x_step = 250.0;
  std::ostringstream out, err;
  CHECK(cmd_hopcurve(cfg, out, err) == 0);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line.rfind("250,,", 0) == 0);          // no exact column in 2-D
  CHECK(line.find(",0.5625") == std::string::npos);  // slope term present at x>0
}

TEST_CASE("validate passes at defaults and fails when tightened") {
  RunConfig cfg;
  cfg.trials = 400;
  cfg.line_length = 2000.0;
  std::ostringstream out, err;
  CHECK(cmd_validate(cfg, out, err) == 0);
  CHECK(out.str().find("VALIDATE PASS") != std::string::npos);
  bool no_fail_line = out.str().find("FAIL ") == std::string::npos;
  CHECK(no_fail_line);

  RunConfig tight = cfg;
  tight.tolerance_scale = 1e-6;
  std::ostringstream out2, err2, out3, err3;
  CHECK(cmd_validate(tight, out2, err2) == 1);
  CHECK(out2.str().find("FAIL") != std::string::npos);
  // Reproducible FAIL set.
  cmd_validate(tight, out3, err3);
  CHECK(out2.str() == out3.str());
}

TEST_CASE("validate rejects invalid radio configuration before computing") {
  RunConfig cfg;
  cfg.r_i = 100.0;
  std::ostringstream out, err;
  CHECK(cmd_validate(cfg, out, err) == 2);
  CHECK(out.str().empty());
}
