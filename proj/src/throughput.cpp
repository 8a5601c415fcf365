#include "mhcap/throughput.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mhcap/errors.hpp"
#include "mhcap/numerics.hpp"

namespace mhcap::throughput {

double t_max_perfect(double capacity_c, double hops_blocking) {
  if (!(capacity_c > 0.0))
    throw std::domain_error("t_max_perfect: capacity must be positive");
  if (!(hops_blocking >= 0.0))
    throw std::domain_error("t_max_perfect: blocking hops must be nonnegative");
  return capacity_c / (1.0 + hops_blocking);
}

ThroughputResult t_of_r_perfect(double r, double capacity_c,
                                double hops_blocking) {
  if (!(r >= 0.0)) throw std::domain_error("t_of_r_perfect: r must be nonnegative");
  double cap = t_max_perfect(capacity_c, hops_blocking);
  ThroughputResult res;
  res.model = MacModel::PerfectMac;
  res.offered_rate_r = r;
  res.airtime_x = std::min(r / capacity_c, 1.0);
  res.p_col = 0.0;
  res.contending_hops = 0.0;
  res.blocking_hops = hops_blocking;
  res.throughput = std::min(r, cap);
  res.beyond_validity = false;
  return res;
}

double p_col(double airtime_x, double a, double contending_hops) {
  if (!(airtime_x >= 0.0)) throw std::domain_error("p_col: airtime must be nonnegative");
  if (!(a > 0.0 && a <= 1.0)) throw std::domain_error("p_col: a must be in (0,1]");
  if (!(contending_hops >= 0.0))
    throw std::domain_error("p_col: contending hops must be nonnegative");
  double denom = 1.0 - contending_hops * airtime_x;
  if (!(denom > 0.0)) {
    std::ostringstream msg;
    msg << "p_col: channel over-driven, contending_hops * x = "
        << contending_hops * airtime_x << " >= 1";
    throw SaturationError(msg.str());
  }
  return a * airtime_x / denom;
}

namespace {

struct MacContext {
  double capacity;
  double a;
  double n_rcs;       // N(R_cs)
  double contending;  // N(R_cs) - N(0)
};

MacContext mac_context(const RadioParams& params, const HopFn& hops,
                       double d_i) {
  if (!(d_i >= 0.0)) throw std::domain_error("t_max_mac: d_i must be nonnegative");
  MacContext ctx;
  ctx.capacity = params.capacity_c;
  ctx.a = params.airtime_fraction_a;
  ctx.n_rcs = hops(params.r_cs);
  ctx.contending = hops(d_i + params.r_cs) - hops(d_i);
  if (ctx.contending < 0.0)
    throw std::domain_error("t_max_mac: hop function decreasing on [d_i, d_i + R_cs]");
  return ctx;
}

// Airtime at which P_col reaches 1; the model is meaningless past it.
double airtime_pcol_one(const MacContext& ctx) {
  return 1.0 / (ctx.a + ctx.contending);
}

}  // namespace

ThroughputResult t_max_mac(const RadioParams& params, const HopFn& hops,
                           double d_i) {
  MacContext ctx = mac_context(params, hops, d_i);
  double hi = std::min(1.0, airtime_pcol_one(ctx));
  auto residual = [&ctx](double x) {
    return (1.0 - p_col(x, ctx.a, ctx.contending)) / (1.0 + ctx.n_rcs) - x;
  };
  // residual(0+) = 1/(1+N) > 0 and residual(hi) = -hi < 0 (P_col(hi) = 1 or
  // x = 1), so the fixed point always lies inside.
  double lo = 0.0;
  if (!(residual(hi * (1.0 - 1e-15)) < 0.0)) {
    std::ostringstream msg;
    msg << "t_max_mac: no fixed point in (0, " << hi << ")";
    throw BracketError(msg.str());
  }
  double x_star = num::bisect(residual, lo, hi * (1.0 - 1e-15), 1e-14, 300);

  ThroughputResult res;
  res.model = MacModel::Mac80211;
  res.airtime_x = x_star;
  res.p_col = p_col(x_star, ctx.a, ctx.contending);
  res.contending_hops = ctx.contending;
  res.blocking_hops = ctx.n_rcs;
  res.throughput = x_star * ctx.capacity;
  res.offered_rate_r = res.throughput;
  res.beyond_validity = false;
  return res;
}

ThroughputResult t_of_r_mac(double r, const RadioParams& params,
                            const HopFn& hops, double d_i) {
  if (!(r >= 0.0)) throw std::domain_error("t_of_r_mac: r must be nonnegative");
  MacContext ctx = mac_context(params, hops, d_i);
  ThroughputResult max = t_max_mac(params, hops, d_i);

  ThroughputResult res;
  res.model = MacModel::Mac80211;
  res.offered_rate_r = r;
  res.contending_hops = ctx.contending;
  res.blocking_hops = ctx.n_rcs;
  double x = r / ctx.capacity;
  res.airtime_x = std::min(x, 1.0);
  res.beyond_validity = r > max.throughput * (1.0 + 1e-12);
  if (x < airtime_pcol_one(ctx)) {
    res.p_col = p_col(x, ctx.a, ctx.contending);
    res.throughput =
        std::min(r, (1.0 - res.p_col) * ctx.capacity / (1.0 + ctx.n_rcs));
  } else {
    // Past the collision-certainty point the formula has left its sample
    // space; report zero useful throughput and flag the row.
    res.p_col = 1.0;
    res.throughput = 0.0;
    res.beyond_validity = true;
  }
  return res;
}

double hidden_node_expected(double x, double mean_hop, const HopFn& hops) {
  if (!(x >= 0.0)) throw std::domain_error("hidden_node_expected: x must be nonnegative");
  if (!(mean_hop > 0.0))
    throw std::domain_error("hidden_node_expected: mean hop must be positive");
  return hops(x + mean_hop) - hops(x);
}

double airtime_fraction(const MacTimings& t) {
  if (!(t.bitrate_bps > 0.0) || t.payload_bytes <= 0 || t.mac_header_bytes < 0 ||
      t.ack_bytes < 0 || t.cw_min < 0)
    throw std::domain_error("airtime_fraction: invalid timing configuration");
  double us_per_byte = 8e6 / t.bitrate_bps;
  double data = t.preamble_us + (t.payload_bytes + t.mac_header_bytes) * us_per_byte;
  double ack = t.preamble_us + t.ack_bytes * us_per_byte;
  double backoff = t.slot_us * t.cw_min / 2.0;
  double total = t.difs_us + backoff + data + t.sifs_us + ack;
  return data / total;
}

double single_hop_capacity(const MacTimings& t) {
  double a = airtime_fraction(t);
  double us_per_byte = 8e6 / t.bitrate_bps;
  double data = t.preamble_us + (t.payload_bytes + t.mac_header_bytes) * us_per_byte;
  double total = data / a;
  return t.payload_bytes * 8.0 / (total * 1e-6);
}

}  // namespace mhcap::throughput
