#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mhcap/radio.hpp"
#include "mhcap/throughput.hpp"

namespace mhcap::cli {

enum class Experiment { HopCurve, HiddenNodes, Throughput, Moments };

// One fully resolved experiment description. Defaults reproduce the reference
// setup: r_tx 250 m, r_i 450 m, r_cs 500 m, C 0.87 Mbit/s, 99% intervals.
struct RunConfig {
  Experiment experiment = Experiment::HopCurve;
  RoutingPolicy policy = RoutingPolicy::RandomNeighbor;
  int dim = 1;

  double r_tx = 250.0;
  double r_i = 450.0;
  double r_cs = 500.0;
  double capacity_c = 0.87e6;
  // Negative means "derive from timings".
  double airtime_a = -1.0;
  throughput::MacTimings timings{};

  double lambda = 0.04;        // nodes/m (1-D) or nodes/m^2 (2-D)
  double aop_deg = 60.0;       // 2-D angle of progression, degrees
  double line_length = 1250.0; // 1-D deployment length
  double extent_x = 2000.0;    // 2-D region
  double extent_y = 1000.0;

  double x_max = 1250.0;
  double x_step = 125.0;
  std::vector<double> rates;  // offered rates for Throughput, bit/s

  long trials = 2000;
  std::uint64_t master_seed = 1;
  double ci_level = 0.99;
  double tolerance_scale = 1.0;  // validate-only: <1 tightens every threshold

  std::string output_path;  // empty = stdout

  RadioParams radio() const;
  Deployment deployment() const;
  double effective_airtime_a() const;
  std::vector<double> x_grid() const;
  std::vector<double> rate_grid() const;
};

// Commands. Each returns a process exit code: 0 success, 1 validation/model
// failure, 2 usage error. Diagnostics go to `err`; CSV goes to the configured
// output path (partial files are removed on failure) or to `out` when the
// path is empty.
int cmd_hopcurve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_hidden(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_moments(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_throughput(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Shortest round-trip decimal formatting used for every CSV number.
std::string format_double(double v);

// The config echo line written as the first comment of every CSV.
std::string config_comment(const RunConfig& cfg, const char* command);

}  // namespace mhcap::cli
