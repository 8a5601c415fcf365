#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mhcap/hop_curve.hpp"
#include "mhcap/radio.hpp"

namespace mhcap::sim {

// Identifies one trial of one experiment. Identical (master_seed, trial_index)
// pairs reproduce identical trials regardless of execution order.
struct SeededRun {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
};

// xoshiro256++ with a splitmix64-expanded per-trial state. Self-contained so
// that streams are identical across platforms and thread counts.
class Rng {
 public:
  explicit Rng(SeededRun run);

  std::uint64_t next_u64();
  double uniform01();                    // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  std::uint64_t pick_index(std::uint64_t n);  // uniform in [0, n)
  long poisson(double mean);

 private:
  std::uint64_t s_[4];
};

// Homogeneous PPP on [0, length]: Poisson(lambda*length) many points, i.i.d.
// uniform, sorted ascending.
std::vector<double> sample_ppp_1d(double lambda, double length, SeededRun run);

struct PolarPoint {
  double radius;
  double angle;  // within [-theta/2, theta/2]
};

// PPP on a sector of angle theta and the given radius: Poisson(lambda theta
// r^2 / 2) many points, radii with density 2x/r^2, angles uniform.
std::vector<PolarPoint> sample_ppp_sector(double lambda, double theta,
                                          double radius, SeededRun run);

// Next-hop choice among the nodes of a sorted 1-D deployment that lie in
// (current, current + r_tx]. Returns the chosen node index, or nullopt when
// the candidate set is empty (caller censors the trial).
std::optional<std::size_t> next_hop_1d(const std::vector<double>& nodes,
                                       double current, RoutingPolicy policy,
                                       double r_tx, Rng& rng);

// Throwing wrapper around next_hop_1d (DeadEndError on empty candidate set).
std::size_t route_next_hop(const std::vector<double>& nodes, double current,
                           RoutingPolicy policy, double r_tx, Rng& rng);

// Next-hop choice within a forward sector already oriented at the
// destination: uniform pick or maximum radial progress, ties to the lowest
// index. Returns nullopt when the sector is empty.
std::optional<std::size_t> next_hop_sector(const std::vector<PolarPoint>& nodes,
                                           RoutingPolicy policy, Rng& rng);

struct TrialEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_level = 0.99;
  long trials_run = 0;
  long trials_censored = 0;

  // Censoring-rate diagnostic threshold from the estimator contract.
  bool high_censoring() const {
    return trials_run > 0 &&
           static_cast<double>(trials_censored) / trials_run > 0.05;
  }
};

struct HopCurveEstimate {
  HopCurve curve;  // method MonteCarlo, one sample per grid x
  long trials_run = 0;
  long trials_censored = 0;
  double ci_level = 0.99;
  bool high_censoring() const {
    return trials_run > 0 &&
           static_cast<double>(trials_censored) / trials_run > 0.05;
  }
};

// Monte Carlo estimate of N(x) on the grid: per trial, walk the policy over a
// fresh deployment and record the hop index whose cumulative progress first
// exceeds each grid x. Trials that dead-end before the last grid point are
// censored. In 2-D, progress is Euclidean distance from the source.
HopCurveEstimate estimate_n(const std::vector<double>& x_grid,
                            RoutingPolicy policy, const Deployment& dep,
                            const RadioParams& radio, long trials,
                            std::uint64_t master_seed);

// Monte Carlo estimate of N(x + E[d]) - N(x) (forwarding nodes per window of
// one mean hop), E[d] from the policy's analytic mean.
HopCurveEstimate estimate_hidden(const std::vector<double>& x_grid,
                                 RoutingPolicy policy, const Deployment& dep,
                                 const RadioParams& radio, long trials,
                                 std::uint64_t master_seed);

struct MomentEstimate {
  TrialEstimate mean;           // meters
  TrialEstimate second_moment;  // meters^2
};

// Empirical single-hop forward distance moments under the policy.
MomentEstimate estimate_hop_moments(RoutingPolicy policy, const Deployment& dep,
                                    const RadioParams& radio, long trials,
                                    std::uint64_t master_seed);

// Worker count for trial-parallel estimators: MHCAP_THREADS when set, else 1.
// Results are invariant to it.
int thread_count();

}  // namespace mhcap::sim
