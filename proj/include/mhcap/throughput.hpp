#pragma once

#include <functional>

#include "mhcap/radio.hpp"

namespace mhcap::throughput {

enum class MacModel { PerfectMac, Mac80211 };

// N(x) of the routing policy in use.
using HopFn = std::function<double(double)>;

struct ThroughputResult {
  double offered_rate_r = 0.0;   // bit/s
  double airtime_x = 0.0;        // r / C, clamped to [0, 1]
  double p_col = 0.0;            // collision probability
  double contending_hops = 0.0;  // N(d_i + R_cs) - N(d_i)
  double blocking_hops = 0.0;    // N(R_i) or N(R_cs), per model
  double throughput = 0.0;       // T(r), bit/s
  MacModel model = MacModel::PerfectMac;
  // Set when the offered rate exceeds the model's operating maximum; the
  // collision formula overestimates there and the numbers are extrapolation.
  bool beyond_validity = false;

  double fixed_point_residual() const {
    return airtime_x - (1.0 - p_col) / (1.0 + blocking_hops);
  }
};

// Perfect-MAC capacity C / (1 + N(R_i)).
double t_max_perfect(double capacity_c, double hops_blocking);

// T(r) = min{r, C / (1 + N(R_i))} with zero collision probability.
ThroughputResult t_of_r_perfect(double r, double capacity_c,
                                double hops_blocking);

// Collision probability a x / (1 - contending * x). Throws SaturationError
// when the denominator is not positive.
double p_col(double airtime_x, double a, double contending_hops);

// Self-consistent operating point: solves x = (1 - P_col(x)) / (1 + N(R_cs))
// and returns T_max = x C with the solved collision probability. d_i is the
// reference node's distance from the source; the model fixes it at 0 but the
// parameter is open for sensitivity studies.
ThroughputResult t_max_mac(const RadioParams& params, const HopFn& hops,
                           double d_i = 0.0);

// Direct evaluation at offered rate r; beyond t_max_mac the result is flagged
// rather than rejected.
ThroughputResult t_of_r_mac(double r, const RadioParams& params,
                            const HopFn& hops, double d_i = 0.0);

// Expected forwarding nodes in a window of one mean hop: N(x + E[d]) - N(x).
double hidden_node_expected(double x, double mean_hop, const HopFn& hops);

// 802.11 exchange timing, used to derive the airtime fraction when it is not
// given explicitly. Defaults follow a 1 Mbit/s DSSS setup with a 1000-byte
// payload and no RTS/CTS.
struct MacTimings {
  double bitrate_bps = 1e6;
  int payload_bytes = 1000;
  int mac_header_bytes = 28;  // header + FCS
  int ack_bytes = 14;
  double preamble_us = 192.0;  // PHY preamble + PLCP header
  double sifs_us = 10.0;
  double difs_us = 50.0;
  double slot_us = 20.0;
  int cw_min = 31;  // mean backoff = slot * cw_min / 2
};

// Fraction of a successful exchange occupied by the data frame.
double airtime_fraction(const MacTimings& t);

// Payload bits divided by total exchange time; sanity reference for C.
double single_hop_capacity(const MacTimings& t);

}  // namespace mhcap::throughput
