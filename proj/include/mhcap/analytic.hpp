#pragma once

#include <memory>

#include "mhcap/radio.hpp"

namespace mhcap::analytic {

// Beyond this many transmission ranges the alternating hop-count series are
// evaluated by their linear asymptote instead (the term count and magnitude
// make the exact sums pointless there).
inline constexpr int kSeriesHorizon = 20;

struct SeriesEval {
  double hops;
  bool beyond_horizon;  // true when the linear fallback was used
};

// Expected i.i.d.-uniform hops whose forward progress exceeds x.
// 0 for x < 0, 1 at x = 0, alternating sum otherwise. Density-free.
double n_random_1d(double x, double r_tx);
SeriesEval n_random_1d_eval(double x, double r_tx, int horizon = kSeriesHorizon);

// psi(x) = lambda x / (1 - e^{-lambda R}); negative x allowed.
double psi(double x, double lambda, double r_tx);

// Constant terms of the furthest-neighbor hop-count series, n >= 1.
double c_n(int n, double lambda, double r_tx);

// Expected furthest-neighbor hops whose forward progress exceeds x.
//
// The series constants cancel to ~e^{-n lambda R} through terms of order
// e^{+n lambda R}, far beyond double precision, so evaluation runs in
// arbitrary precision scaled to lambda * r_tx * ceil(x/R) and rounds once at
// the end. Instances are immutable after construction and safe to share
// across threads.
class FurthestHopCurve {
 public:
  FurthestHopCurve(double lambda, double r_tx, int horizon = kSeriesHorizon);
  ~FurthestHopCurve();
  FurthestHopCurve(FurthestHopCurve&&) noexcept;
  FurthestHopCurve& operator=(FurthestHopCurve&&) noexcept;

  SeriesEval evaluate(double x) const;
  double operator()(double x) const { return evaluate(x).hops; }

  double mean_hop() const;       // E[X_F]
  double second_moment() const;  // E[X_F^2]
  double lambda() const;
  double r_tx() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double n_furthest_1d(double x, double lambda, double r_tx);

// x / E[Y] + E[Y^2] / (2 E^2[Y]) for any hop-length law with those moments.
double linear_approx(double x, double moment1, double moment2);

struct HopMoments {
  double mean;
  double second_moment;
};

// First two moments of the furthest-neighbor single-hop distance.
HopMoments furthest_moments_1d(double lambda, double r_tx);

// Inputs of the incomplete-gamma baseline model.
struct GammaBaselineParams {
  double d_bar;       // mean hop length, in (0, r_tx]
  double beta;        // 1 + d_bar * lambda
  double distance_d;  // source-destination distance

  static GammaBaselineParams checked(double d_bar, double lambda,
                                     double distance_d, double r_tx) {
    if (!(d_bar > 0.0 && d_bar <= r_tx))
      throw std::invalid_argument("GammaBaselineParams: d_bar must be in (0, r_tx]");
    if (!(lambda > 0.0) || !(distance_d > 0.0))
      throw std::invalid_argument("GammaBaselineParams: lambda and distance must be positive");
    return {d_bar, 1.0 + d_bar * lambda, distance_d};
  }
};

// Expected hop count of the incomplete-gamma baseline model at distance d,
// summed until the tail mass drops below `tail_tol`.
double gamma_baseline_hops(double distance_d, double lambda, double d_bar,
                           double tail_tol = 1e-12);
double gamma_baseline_hops(const GammaBaselineParams& params, double lambda,
                           double tail_tol = 1e-12);

// Mean hop length of the baseline model under furthest routing: root of the
// implicit equation d = (1/lambda) ln(1 - lambda d / (lambda - lambda d - 1)).
double furthest_dbar_implicit(double lambda);

// 2-D random-neighbor linear approximation, 3x/(2R) + 9/16.
double n_random_2d_approx(double x, double r_tx);

enum class Exf2dMode { Exact, Approx };

// Mean distance to the furthest node in a sector of angle theta and radius R.
// Exact integrates e^{(theta/2) lambda x^2}; Approx replaces the integral
// term by its Chebyshev bound 2/(R lambda theta).
double e_xf2d(double lambda, double theta, double r_tx, Exf2dMode mode);

// Exact E[X_F2D^2] = R^2 e^s/(e^s - 1) - 2/(lambda theta), s = (theta/2) lambda R^2.
double xf2d_second_moment(double lambda, double theta, double r_tx);

// 2-D furthest-neighbor linear approximation, (x + R/2) / E[X_F2D].
double n_furthest_2d_approx(double x, double lambda, double theta, double r_tx,
                            Exf2dMode mode = Exf2dMode::Exact);

}  // namespace mhcap::analytic
