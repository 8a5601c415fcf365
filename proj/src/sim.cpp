#include "mhcap/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "mhcap/analytic.hpp"
#include "mhcap/errors.hpp"

namespace mhcap::sim {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(SeededRun run) {
  // Counter-based substream: expand (master_seed, trial_index) through
  // splitmix64 so that trial streams are independent of execution order.
  std::uint64_t x = mix64(run.master_seed + 0x9E3779B97F4A7C15ULL) ^
                    mix64(run.trial_index * 0xBF58476D1CE4E5B9ULL + 0x2545F4914F6CDD1DULL);
  for (auto& s : s_) {
    x += 0x9E3779B97F4A7C15ULL;
    s = mix64(x);
  }
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t Rng::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::uint64_t Rng::pick_index(std::uint64_t n) {
  if (n == 0) throw std::domain_error("pick_index: empty range");
  auto i = static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

namespace {

long poisson_small(Rng& rng, double mu) {
  double u = rng.uniform01();
  double p = std::exp(-mu);
  double cum = p;
  long k = 0;
  const long cap = static_cast<long>(mu + 12.0 * std::sqrt(mu + 1.0) + 30.0);
  while (u >= cum && k < cap) {
    ++k;
    p *= mu / k;
    cum += p;
  }
  return k;
}

}  // namespace

long Rng::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::domain_error("poisson: mean must be nonnegative");
  // Inversion in chunks of 30 keeps e^{-mu} well inside double range while
  // staying an exact Poisson sampler (sum of independent Poissons).
  long total = 0;
  while (mean > 30.0) {
    total += poisson_small(*this, 30.0);
    mean -= 30.0;
  }
  total += poisson_small(*this, mean);
  return total;
}

namespace {

std::vector<double> sample_line(Rng& rng, double lambda, double length) {
  long count = rng.poisson(lambda * length);
  std::vector<double> pts(static_cast<std::size_t>(count));
  for (auto& p : pts) p = rng.uniform01() * length;
  std::sort(pts.begin(), pts.end());
  return pts;
}

std::vector<PolarPoint> sample_sector(Rng& rng, double lambda, double theta,
                                      double radius) {
  long count = rng.poisson(lambda * 0.5 * theta * radius * radius);
  std::vector<PolarPoint> pts(static_cast<std::size_t>(count));
  for (auto& p : pts) {
    p.radius = radius * std::sqrt(rng.uniform01());  // CDF x^2 / r^2
    p.angle = (rng.uniform01() - 0.5) * theta;
  }
  return pts;
}

}  // namespace

std::vector<double> sample_ppp_1d(double lambda, double length, SeededRun run) {
  if (!(lambda > 0.0) || !(length > 0.0))
    throw std::domain_error("sample_ppp_1d: lambda and length must be positive");
  Rng rng(run);
  return sample_line(rng, lambda, length);
}

std::vector<PolarPoint> sample_ppp_sector(double lambda, double theta,
                                          double radius, SeededRun run) {
  if (!(lambda > 0.0) || !(theta > 0.0) || !(radius > 0.0))
    throw std::domain_error("sample_ppp_sector: all arguments must be positive");
  Rng rng(run);
  return sample_sector(rng, lambda, theta, radius);
}

std::optional<std::size_t> next_hop_1d(const std::vector<double>& nodes,
                                       double current, RoutingPolicy policy,
                                       double r_tx, Rng& rng) {
  auto lo = std::upper_bound(nodes.begin(), nodes.end(), current);
  auto hi = std::upper_bound(lo, nodes.end(), current + r_tx);
  auto count = static_cast<std::size_t>(hi - lo);
  if (count == 0) return std::nullopt;
  if (policy == RoutingPolicy::RandomNeighbor) {
    return static_cast<std::size_t>(lo - nodes.begin()) + rng.pick_index(count);
  }
  // Furthest forward progress; ties resolve to the lowest node index.
  auto first_best = std::lower_bound(lo, hi, *(hi - 1));
  return static_cast<std::size_t>(first_best - nodes.begin());
}

std::size_t route_next_hop(const std::vector<double>& nodes, double current,
                           RoutingPolicy policy, double r_tx, Rng& rng) {
  auto hop = next_hop_1d(nodes, current, policy, r_tx, rng);
  if (!hop) throw DeadEndError("route_next_hop: no forward candidate in range");
  return *hop;
}

std::optional<std::size_t> next_hop_sector(const std::vector<PolarPoint>& nodes,
                                           RoutingPolicy policy, Rng& rng) {
  if (nodes.empty()) return std::nullopt;
  if (policy == RoutingPolicy::RandomNeighbor)
    return static_cast<std::size_t>(rng.pick_index(nodes.size()));
  std::size_t pick = 0;
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (nodes[i].radius > nodes[pick].radius) pick = i;
  return pick;
}

int thread_count() {
  const char* env = std::getenv("MHCAP_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  if (n < 1) return 1;
  return std::min(n, 256);
}

namespace {

// Runs fn(trial) for every trial index; worker count never affects which
// random stream a trial sees, so results are reduction-order stable.
template <typename Fn>
void run_trials(long trials, Fn&& fn) {
  int workers = thread_count();
  if (workers <= 1) {
    for (long t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (long t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) fn(t);
    });
  }
  for (auto& th : pool) th.join();
}

struct XY {
  double x, y;
};

// One routing walk; appends the cumulative forward progress of every hop
// until progress exceeds `target` or the walk dead-ends. Returns false when
// censored (dead end before the target).
//
// Each hop sees a fresh forward window of the point process (the Palm view):
// hop lengths are then exactly i.i.d. draws from the policy's law, which is
// the process the hop-count series describe. Re-picking over one frozen
// realization would bias random-neighbor hops long by ~1/(lambda R) (the
// chosen node leaves its window one point short) and break both the oracle
// contract and the density-independence of the random policy.
bool walk_line(Rng& rng, double lambda, RoutingPolicy policy, double r_tx,
               double target, std::vector<double>& progress) {
  double current = 0.0;
  while (current <= target) {
    auto window = sample_line(rng, lambda, r_tx);
    for (auto& p : window) p += current;
    auto next = next_hop_1d(window, current, policy, r_tx, rng);
    if (!next) return false;
    current = window[*next];
    progress.push_back(current);
  }
  return true;
}

bool walk_sector(Rng& rng, double lambda, const SectorGeometry& geo,
                 RoutingPolicy policy, double r_tx, double target,
                 std::vector<double>& progress) {
  const XY dest{std::max(geo.extent_x, target + r_tx), 0.0};
  XY cur{0.0, 0.0};
  double progress_from_source = 0.0;
  while (progress_from_source <= target) {
    auto window = sample_sector(rng, lambda, geo.aop_theta, r_tx);
    auto chosen = next_hop_sector(window, policy, rng);
    if (!chosen) return false;
    std::size_t pick = *chosen;
    // Sector axis points from the current node toward the destination.
    double axis = std::atan2(dest.y - cur.y, dest.x - cur.x);
    double ang = axis + window[pick].angle;
    cur.x += window[pick].radius * std::cos(ang);
    cur.y += window[pick].radius * std::sin(ang);
    progress_from_source = std::hypot(cur.x, cur.y);
    progress.push_back(progress_from_source);
  }
  return true;
}

struct TrialTable {
  // counts[t * grid + g]; censored[t] nonzero when the trial dead-ended.
  std::vector<long> counts;
  std::vector<char> censored;
};

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("estimate: empty x grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw std::invalid_argument("estimate: grid x must be >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("estimate: grid must be strictly increasing");
  }
}

// Shared driver: per trial, walk and convert hop progress into per-grid
// counts through `tally`, then reduce mean/stderr in trial-index order.
template <typename Tally>
HopCurveEstimate estimate_counts(const std::vector<double>& x_grid,
                                 RoutingPolicy policy, const Deployment& dep,
                                 const RadioParams& radio, long trials,
                                 std::uint64_t master_seed, double walk_target,
                                 bool monotone, Tally&& tally) {
  check_grid(x_grid);
  if (trials < 2) throw std::domain_error("estimate: trials must be >= 2");

  const auto n_grid = x_grid.size();
  TrialTable table;
  table.counts.assign(static_cast<std::size_t>(trials) * n_grid, 0);
  table.censored.assign(static_cast<std::size_t>(trials), 0);

  run_trials(trials, [&](long t) {
    Rng rng(SeededRun{master_seed, static_cast<std::uint64_t>(t)});
    std::vector<double> progress;
    bool ok;
    if (dep.is_line()) {
      ok = walk_line(rng, dep.lambda, policy, radio.r_tx, walk_target, progress);
    } else {
      const auto& sec = std::get<SectorGeometry>(dep.geometry);
      ok = walk_sector(rng, dep.lambda, sec, policy, radio.r_tx, walk_target,
                       progress);
    }
    if (!ok) {
      table.censored[static_cast<std::size_t>(t)] = 1;
      return;
    }
    tally(progress, &table.counts[static_cast<std::size_t>(t) * n_grid]);
  });

  HopCurveEstimate est;
  est.trials_run = trials;
  est.curve.method = HopMethod::MonteCarlo;
  est.curve.r_tx = radio.r_tx;
  est.curve.lambda = dep.lambda;
  long kept = 0;
  for (long t = 0; t < trials; ++t)
    if (!table.censored[static_cast<std::size_t>(t)]) ++kept;
  est.trials_censored = trials - kept;
  if (kept == 0) throw AllCensoredError("estimate: every trial was censored");

  for (std::size_t g = 0; g < n_grid; ++g) {
    double sum = 0.0, sumsq = 0.0;
    for (long t = 0; t < trials; ++t) {
      if (table.censored[static_cast<std::size_t>(t)]) continue;
      auto v = static_cast<double>(table.counts[static_cast<std::size_t>(t) * n_grid + g]);
      sum += v;
      sumsq += v * v;
    }
    double mean = sum / kept;
    double se = 0.0;
    if (kept > 1) {
      double var = (sumsq - kept * mean * mean) / (kept - 1);
      if (var < 0.0) var = 0.0;
      se = std::sqrt(var / kept);
    }
    est.curve.samples.push_back({x_grid[g], mean, se});
  }
  est.curve.validate(monotone);
  return est;
}

double policy_mean_hop(RoutingPolicy policy, const Deployment& dep,
                       const RadioParams& radio) {
  if (dep.is_line()) {
    return policy == RoutingPolicy::RandomNeighbor
               ? 0.5 * radio.r_tx
               : analytic::furthest_moments_1d(dep.lambda, radio.r_tx).mean;
  }
  const auto& sec = std::get<SectorGeometry>(dep.geometry);
  return policy == RoutingPolicy::RandomNeighbor
             ? 2.0 * radio.r_tx / 3.0
             : analytic::e_xf2d(dep.lambda, sec.aop_theta, radio.r_tx,
                                analytic::Exf2dMode::Exact);
}

}  // namespace

HopCurveEstimate estimate_n(const std::vector<double>& x_grid,
                            RoutingPolicy policy, const Deployment& dep,
                            const RadioParams& radio, long trials,
                            std::uint64_t master_seed) {
  check_grid(x_grid);
  double target = x_grid.back();
  return estimate_counts(
      x_grid, policy, dep, radio, trials, master_seed, target, /*monotone=*/true,
      [&x_grid](const std::vector<double>& progress, long* out) {
        // out[g] = first hop index whose cumulative progress exceeds x_g.
        std::size_t g = 0;
        for (std::size_t hop = 0; hop < progress.size() && g < x_grid.size(); ++hop) {
          while (g < x_grid.size() && progress[hop] > x_grid[g]) {
            out[g] = static_cast<long>(hop) + 1;
            ++g;
          }
        }
      });
}

HopCurveEstimate estimate_hidden(const std::vector<double>& x_grid,
                                 RoutingPolicy policy, const Deployment& dep,
                                 const RadioParams& radio, long trials,
                                 std::uint64_t master_seed) {
  check_grid(x_grid);
  double mean_hop = policy_mean_hop(policy, dep, radio);
  double target = x_grid.back() + mean_hop;
  return estimate_counts(
      x_grid, policy, dep, radio, trials, master_seed, target, /*monotone=*/false,
      [&x_grid, mean_hop](const std::vector<double>& progress, long* out) {
        // out[g] = crossing-index difference, i.e. hops consumed between the
        // first exceedance of x_g and of x_g + E[d]. 2-D progress need not be
        // monotone, so this is a scan rather than a binary search.
        auto first_exceed = [&progress](double y) {
          for (std::size_t h = 0; h < progress.size(); ++h)
            if (progress[h] > y) return static_cast<long>(h) + 1;
          return static_cast<long>(progress.size()) + 1;
        };
        for (std::size_t g = 0; g < x_grid.size(); ++g)
          out[g] = first_exceed(x_grid[g] + mean_hop) - first_exceed(x_grid[g]);
      });
}

MomentEstimate estimate_hop_moments(RoutingPolicy policy, const Deployment& dep,
                                    const RadioParams& radio, long trials,
                                    std::uint64_t master_seed) {
  if (trials < 2) throw std::domain_error("estimate_hop_moments: trials must be >= 2");
  std::vector<double> dist(static_cast<std::size_t>(trials), -1.0);  // -1 = censored

  run_trials(trials, [&](long t) {
    Rng rng(SeededRun{master_seed, static_cast<std::uint64_t>(t)});
    if (dep.is_line()) {
      auto nodes = sample_line(rng, dep.lambda, radio.r_tx);
      auto hop = next_hop_1d(nodes, 0.0, policy, radio.r_tx, rng);
      if (hop) dist[static_cast<std::size_t>(t)] = nodes[*hop];
    } else {
      const auto& sec = std::get<SectorGeometry>(dep.geometry);
      auto pts = sample_sector(rng, dep.lambda, sec.aop_theta, radio.r_tx);
      auto pick = next_hop_sector(pts, policy, rng);
      if (pick) dist[static_cast<std::size_t>(t)] = pts[*pick].radius;
    }
  });

  long kept = 0;
  double s1 = 0.0, s2 = 0.0, s1sq = 0.0, s2sq = 0.0;
  for (long t = 0; t < trials; ++t) {
    double d = dist[static_cast<std::size_t>(t)];
    if (d < 0.0) continue;
    ++kept;
    s1 += d;
    s1sq += d * d;
    s2 += d * d;
    s2sq += d * d * d * d;
  }
  if (kept == 0) throw AllCensoredError("estimate_hop_moments: every trial censored");

  auto finish = [&](double sum, double sumsq) {
    TrialEstimate e;
    e.trials_run = trials;
    e.trials_censored = trials - kept;
    e.mean = sum / kept;
    if (kept > 1) {
      double var = (sumsq - kept * e.mean * e.mean) / (kept - 1);
      if (var < 0.0) var = 0.0;
      e.std_error = std::sqrt(var / kept);
    }
    return e;
  };
  return MomentEstimate{finish(s1, s1sq), finish(s2, s2sq)};
}

}  // namespace mhcap::sim
