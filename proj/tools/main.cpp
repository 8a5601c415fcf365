#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mhcap/experiment.hpp"

namespace {

using mhcap::RoutingPolicy;
using mhcap::cli::Experiment;
using mhcap::cli::RunConfig;

std::vector<double> parse_rates(const std::vector<std::string>& tokens) {
  std::vector<double> rates;
  for (const auto& tok : tokens) {
    auto c1 = tok.find(':');
    if (c1 != std::string::npos) {
      // lo:step:hi expansion
      auto c2 = tok.find(':', c1 + 1);
      if (c2 == std::string::npos)
        throw CLI::ValidationError("--rates", "range needs lo:step:hi");
      double lo = std::stod(tok.substr(0, c1));
      double step = std::stod(tok.substr(c1 + 1, c2 - c1 - 1));
      double hi = std::stod(tok.substr(c2 + 1));
      if (step <= 0) throw CLI::ValidationError("--rates", "step must be positive");
      for (double r = lo; r <= hi * (1 + 1e-12); r += step) rates.push_back(r);
    } else {
      rates.push_back(std::stod(tok));
    }
  }
  return rates;
}

struct Bound {
  RunConfig cfg;
  std::vector<std::string> rate_tokens;
};

void add_common(CLI::App* cmd, Bound& b) {
  std::map<std::string, RoutingPolicy> policies{
      {"random", RoutingPolicy::RandomNeighbor},
      {"furthest", RoutingPolicy::FurthestNeighbor}};
  cmd->add_option("--policy", b.cfg.policy, "Routing policy: random|furthest")
      ->transform(CLI::CheckedTransformer(policies, CLI::ignore_case));
  cmd->add_option("--dim", b.cfg.dim, "Deployment dimension: 1|2")
      ->check(CLI::IsMember({1, 2}));
  cmd->add_option("--lambda", b.cfg.lambda,
                  "Node density (nodes/m in 1-D, nodes/m^2 in 2-D)");
  cmd->add_option("--aop-deg", b.cfg.aop_deg, "2-D angle of progression, degrees");
  cmd->add_option("--rtx", b.cfg.r_tx, "Transmission range, m");
  cmd->add_option("--ri", b.cfg.r_i, "Interference range, m");
  cmd->add_option("--rcs", b.cfg.r_cs, "Carrier sensing range, m");
  cmd->add_option("--capacity", b.cfg.capacity_c, "Single-hop capacity, bit/s");
  auto* a = cmd->add_option("--airtime-a", b.cfg.airtime_a,
                            "Airtime fraction a in (0,1]");
  auto* derive = cmd->add_flag("--derive-a",
                               "Derive a from the 802.11 timing options (default)");
  derive->excludes(a);
  cmd->add_option("--bitrate", b.cfg.timings.bitrate_bps, "Channel bit rate, bit/s");
  cmd->add_option("--payload-bytes", b.cfg.timings.payload_bytes, "Data payload, bytes");
  cmd->add_option("--mac-header-bytes", b.cfg.timings.mac_header_bytes,
                  "MAC header + FCS, bytes");
  cmd->add_option("--ack-bytes", b.cfg.timings.ack_bytes, "ACK frame, bytes");
  cmd->add_option("--preamble-us", b.cfg.timings.preamble_us, "PHY preamble, us");
  cmd->add_option("--sifs-us", b.cfg.timings.sifs_us, "SIFS, us");
  cmd->add_option("--difs-us", b.cfg.timings.difs_us, "DIFS, us");
  cmd->add_option("--slot-us", b.cfg.timings.slot_us, "Slot time, us");
  cmd->add_option("--cw-min", b.cfg.timings.cw_min, "Minimum contention window");
  cmd->add_option("--length", b.cfg.line_length, "1-D line length, m");
  cmd->add_option("--extent-x", b.cfg.extent_x, "2-D region width, m");
  cmd->add_option("--extent-y", b.cfg.extent_y, "2-D region height, m");
  cmd->add_option("--xmax", b.cfg.x_max, "Largest grid distance, m");
  cmd->add_option("--xstep", b.cfg.x_step, "Grid spacing, m");
  cmd->add_option("--rates", b.rate_tokens,
                  "Offered rates, bit/s (comma list and/or lo:step:hi)")
      ->delimiter(',');
  cmd->add_option("--trials", b.cfg.trials, "Monte Carlo trials");
  cmd->add_option("--seed", b.cfg.master_seed, "Master seed");
  cmd->add_option("--ci", b.cfg.ci_level, "Confidence level for intervals");
  cmd->add_option("--tolerance-scale", b.cfg.tolerance_scale,
                  "Scale factor on validate tolerances (<1 tightens)");
  cmd->add_option("--out", b.cfg.output_path, "CSV output path (default stdout)");
  cmd->fallthrough();  // lets --config after the command reach the app
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-hop 802.11 capacity analysis toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file; sections name commands; explicit flags win");

  Bound hop, hidden, moments, thr, validate;
  hop.cfg.experiment = Experiment::HopCurve;
  hidden.cfg.experiment = Experiment::HiddenNodes;
  hidden.cfg.x_max = 1250.0;
  hidden.cfg.x_step = 125.0;
  moments.cfg.experiment = Experiment::Moments;
  moments.cfg.trials = 100000;
  moments.cfg.line_length = 2000.0;
  thr.cfg.experiment = Experiment::Throughput;
  thr.cfg.trials = 1000;
  thr.cfg.line_length = 2000.0;
  validate.cfg.line_length = 2000.0;

  auto* c_hop = app.add_subcommand("hopcurve", "Hop-count curve N(x): analytic, baseline, Monte Carlo");
  add_common(c_hop, hop);
  auto* c_hidden = app.add_subcommand("hidden", "Hidden-node window counts N(x+E[d])-N(x)");
  add_common(c_hidden, hidden);
  auto* c_moments = app.add_subcommand("moments", "Single-hop distance moment estimates");
  add_common(c_moments, moments);
  auto* c_thr = app.add_subcommand("throughput", "Throughput vs offered rate with 802.11 collision model");
  add_common(c_thr, thr);
  auto* c_val = app.add_subcommand("validate", "Run the invariant suite and report PASS/FAIL");
  add_common(c_val, validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto finish = [](Bound& b) {
    if (!b.rate_tokens.empty()) b.cfg.rates = parse_rates(b.rate_tokens);
  };

  try {
    if (c_hop->parsed()) {
      finish(hop);
      return mhcap::cli::cmd_hopcurve(hop.cfg, std::cout, std::cerr);
    }
    if (c_hidden->parsed()) {
      finish(hidden);
      return mhcap::cli::cmd_hidden(hidden.cfg, std::cout, std::cerr);
    }
    if (c_moments->parsed()) {
      finish(moments);
      return mhcap::cli::cmd_moments(moments.cfg, std::cout, std::cerr);
    }
    if (c_thr->parsed()) {
      finish(thr);
      return mhcap::cli::cmd_throughput(thr.cfg, std::cout, std::cerr);
    }
    if (c_val->parsed()) {
      finish(validate);
      return mhcap::cli::cmd_validate(validate.cfg, std::cout, std::cerr);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
