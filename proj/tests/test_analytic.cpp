#include <cmath>
#include <vector>

#include "doctest.h"
#include "mhcap/analytic.hpp"
#include "mhcap/errors.hpp"

using namespace mhcap;
using namespace mhcap::analytic;

namespace {
constexpr double kR = 250.0;
constexpr double kPi = 3.14159265358979323846;

// Reference values computed independently at 120+ digits and frozen here.
const std::vector<double> kGrid{125, 250, 500, 750, 1000, 1250};
const std::vector<double> kNRandom{1.6487212707001281, 2.7182818284590452,
                                   4.6707742704716050, 6.6665656395558899,
                                   8.6666044900326954, 10.666662068622412};
const std::vector<double> kNFurthest004{1.0066940768239966, 2.0004087230629737,
                                        3.0026349004693804, 4.0101666399899324,
                                        5.0290860208555731, 6.0670459255198951};
const std::vector<double> kNFurthest012{1.0000003059022269, 2.0000000000027137,
                                        3.0000000000447294, 4.0000000004657289,
                                        5.0000000036238331, 6.0000000225729260};
}  // namespace

TEST_CASE("random-policy hop count matches the alternating-series values") {
  for (std::size_t i = 0; i < kGrid.size(); ++i)
    CHECK(n_random_1d(kGrid[i], kR) == doctest::Approx(kNRandom[i]).epsilon(1e-12));
  CHECK(n_random_1d(450.0, kR) == doctest::Approx(4.2692147216189720).epsilon(1e-12));
  CHECK(n_random_1d(375.0, kR) == doctest::Approx(3.6573284349880007).epsilon(1e-12));
}

TEST_CASE("random-policy hop count edge conventions") {
  CHECK(n_random_1d(-5.0, kR) == 0.0);
  CHECK(n_random_1d(0.0, kR) == 1.0);
  CHECK_THROWS_AS(n_random_1d(100.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(n_random_1d(100.0, -3.0), std::domain_error);
}

TEST_CASE("random-policy series switches to the linear form past the horizon") {
  auto inside = n_random_1d_eval(20.0 * kR, kR);
  CHECK_FALSE(inside.beyond_horizon);
  auto beyond = n_random_1d_eval(20.0 * kR + 1.0, kR);
  CHECK(beyond.beyond_horizon);
  double t = (20.0 * kR + 1.0) / kR;
  CHECK(beyond.hops == doctest::Approx(2.0 * t + 2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("random-policy curve is nondecreasing and continuous at lattice points") {
  double prev = 0.0;
  for (double x = 0.0; x <= 12.0 * kR; x += kR / 16) {
    double v = n_random_1d(x, kR);
    CHECK(v >= prev);
    prev = v;
  }
  for (int n = 1; n <= 10; ++n) {
    double gap = std::fabs(n_random_1d(n * kR + 1e-9, kR) - n_random_1d(n * kR - 1e-9, kR));
    CHECK(gap < 1e-8);
  }
}

TEST_CASE("random-policy delay ODE residual") {
  const double h = 1e-3 * kR;
  for (int n = 1; n <= 9; ++n) {
    for (double frac : {0.3, 0.6, 0.9}) {
      double x = (n + frac) * kR;
      double lhs = (n_random_1d(x + h, kR) - n_random_1d(x - h, kR)) / (2 * h);
      double rhs = (n_random_1d(x, kR) - n_random_1d(x - kR, kR)) / kR;
      CHECK(std::fabs(lhs - rhs) < 1e-6);
    }
  }
}

TEST_CASE("psi evaluates the scaled-distance exponent") {
  CHECK(psi(0.0, 0.04, kR) == 0.0);
  CHECK(psi(100.0, 0.04, kR) == doctest::Approx(4.0001816079640388).epsilon(1e-14));
  CHECK(psi(-250.0, 0.04, kR) == doctest::Approx(-10.000454019910097).epsilon(1e-14));
  CHECK_THROWS_AS(psi(1.0, 0.0, kR), std::domain_error);
  CHECK_THROWS_AS(psi(1.0, 0.04, 0.0), std::domain_error);
}

TEST_CASE("series constants match high-precision references") {
  CHECK(c_n(1, 0.04, kR) == doctest::Approx(4.5399929762484852e-05).epsilon(1e-13));
  CHECK(c_n(2, 0.04, kR) == doctest::Approx(4.3271127211570692e-08).epsilon(1e-12));
  CHECK(c_n(3, 0.12, kR) == doctest::Approx(3.3931406275795343e-36).epsilon(1e-11));
  CHECK_THROWS_AS(c_n(0, 0.04, kR), std::domain_error);
  CHECK_THROWS_AS(c_n(-2, 0.04, kR), std::domain_error);
}

TEST_CASE("furthest-policy hop count matches high-precision references") {
  FurthestHopCurve f004(0.04, kR);
  FurthestHopCurve f012(0.12, kR);
  FurthestHopCurve f040(0.40, kR);
  for (std::size_t i = 0; i < kGrid.size(); ++i) {
    CHECK(f004(kGrid[i]) == doctest::Approx(kNFurthest004[i]).epsilon(1e-12));
    CHECK(f012(kGrid[i]) == doctest::Approx(kNFurthest012[i]).epsilon(1e-12));
    // lambda R = 100: lattice values are integers up to ~e^{-50} dust.
    CHECK(f040(kGrid[i]) == doctest::Approx(double(i + 1)).epsilon(1e-12));
  }
  CHECK(f040(997.5) == doctest::Approx(4.9810118431238462).epsilon(1e-12));
  CHECK(f004(450.0) == doctest::Approx(2.4063822345214563).epsilon(1e-12));
}

TEST_CASE("furthest-policy hop count edge conventions") {
  FurthestHopCurve f(0.04, kR);
  CHECK(f(-1.0) == 0.0);
  CHECK(f(0.0) == 1.0);
  CHECK(n_furthest_1d(250.0, 0.04, kR) ==
        doctest::Approx(2.0004087230629737).epsilon(1e-12));
  CHECK_THROWS_AS(FurthestHopCurve(0.0, kR), std::domain_error);
  CHECK_THROWS_AS(FurthestHopCurve(0.04, -1.0), std::domain_error);
  CHECK_THROWS_AS(f.evaluate(std::nan("")), std::domain_error);
}

TEST_CASE("furthest-policy series is continuous and monotone") {
  for (double lam : {0.04, 0.12, 0.4}) {
    FurthestHopCurve f(lam, kR);
    for (int n = 1; n <= 10; ++n) {
      double gap = std::fabs(f(n * kR + 1e-9) - f(n * kR - 1e-9));
      CHECK(gap < 1e-8);
    }
    double prev = 0.0;
    for (double x = 0.0; x <= 8.0 * kR; x += kR / 16) {
      double v = f(x);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("furthest-policy delay ODE residual") {
  // At lambda R >= 30 the hop-length law is nearly a point mass, so N has
  // sharp steps and the h^2 N''' differencing error needs a smaller step.
  for (double lam : {0.04, 0.12, 0.4}) {
    const double h = (lam > 0.05 ? 1e-5 : 1e-3) * kR;
    FurthestHopCurve f(lam, kR);
    double alpha = lam / -std::expm1(-lam * kR);
    for (int n = 1; n <= 9; ++n) {
      for (double frac : {0.3, 0.6, 0.9}) {
        double x = (n + frac) * kR;
        double lhs = (f(x + h) - f(x - h)) / (2 * h);
        double rhs = alpha * f(x) - alpha * f(x - kR) - lam;
        CHECK(std::fabs(lhs - rhs) < 1e-6);
      }
    }
  }
}

TEST_CASE("furthest-policy series switches to the linear form past the horizon") {
  FurthestHopCurve f(0.04, kR);
  auto beyond = f.evaluate(20.0 * kR + 1.0);
  CHECK(beyond.beyond_horizon);
  CHECK(beyond.hops ==
        doctest::Approx(linear_approx(20.0 * kR + 1.0, f.mean_hop(),
                                      f.second_moment())).epsilon(1e-12));
  CHECK_FALSE(f.evaluate(20.0 * kR).beyond_horizon);
}

TEST_CASE("linear approximation from hop-length moments") {
  CHECK(linear_approx(0.0, 125.0, kR * kR / 3.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(linear_approx(250.0, 125.0, kR * kR / 3.0) ==
        doctest::Approx(2.0 + 2.0 / 3.0).epsilon(1e-14));
  auto m = furthest_moments_1d(0.04, kR);
  CHECK(linear_approx(500.0, m.mean, m.second_moment) ==
        doctest::Approx(2.7282543165854871).epsilon(1e-12));
  CHECK_THROWS_AS(linear_approx(1.0, 0.0, 100.0), std::domain_error);
  CHECK_THROWS_AS(linear_approx(1.0, 10.0, 99.0), std::domain_error);
}

TEST_CASE("furthest hop-length moments") {
  auto m = furthest_moments_1d(0.04, kR);
  CHECK(m.mean == doctest::Approx(225.01135049775242).epsilon(1e-13));
  CHECK(m.second_moment == doctest::Approx(51252.270099550484).epsilon(1e-13));
  auto m4 = furthest_moments_1d(0.4, kR);
  CHECK(m4.mean == doctest::Approx(247.5).epsilon(1e-13));
  CHECK(m4.second_moment == doctest::Approx(61262.5).epsilon(1e-13));
  // lambda -> 0 limit is the uniform mean R/2.
  CHECK(furthest_moments_1d(1e-8, kR).mean == doctest::Approx(125.0).epsilon(1e-5));

  double prev = kR / 2.0;
  for (double lam : {0.01, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64}) {
    double mean = furthest_moments_1d(lam, kR).mean;
    CHECK(mean > kR / 2.0);
    CHECK(mean <= kR);
    CHECK(mean >= prev);
    prev = mean;
  }
}

TEST_CASE("gamma-baseline expected hops") {
  CHECK(gamma_baseline_hops(250.0, 0.04, 125.0) ==
        doctest::Approx(1.2505358777303996).epsilon(1e-10));
  CHECK(gamma_baseline_hops(1000.0, 0.12, 125.0) ==
        doctest::Approx(7.0312791858129066).epsilon(1e-10));
  // Mass collapses onto the smallest hop count as D -> 0+.
  CHECK(gamma_baseline_hops(0.001, 0.04, 125.0) < 1e-6);
  CHECK_THROWS_AS(gamma_baseline_hops(250.0, 0.04, 125.0, 1e-300), ConvergenceError);
  CHECK_THROWS_AS(gamma_baseline_hops(-1.0, 0.04, 125.0), std::domain_error);
  CHECK_THROWS_AS(gamma_baseline_hops(250.0, 0.04, 0.0), std::domain_error);
}

TEST_CASE("gamma-baseline parameter invariants") {
  auto p = GammaBaselineParams::checked(125.0, 0.04, 500.0, kR);
  CHECK(p.beta == doctest::Approx(6.0));
  CHECK(gamma_baseline_hops(p, 0.04) ==
        doctest::Approx(gamma_baseline_hops(500.0, 0.04, 125.0)).epsilon(1e-14));
  CHECK_THROWS_AS(GammaBaselineParams::checked(0.0, 0.04, 500.0, kR),
                  std::invalid_argument);
  CHECK_THROWS_AS(GammaBaselineParams::checked(300.0, 0.04, 500.0, kR),
                  std::invalid_argument);
  CHECK_THROWS_AS(GammaBaselineParams::checked(125.0, 0.04, -1.0, kR),
                  std::invalid_argument);
}

TEST_CASE("least-squares slope of the random curve matches the asymptote") {
  // Mirror of the linear-fit sanity check: fitted slope over (0, 10R] should
  // land on 2/R within a fraction of a percent.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double x = 25.0; x <= 10.0 * kR; x += 25.0) {
    double y = n_random_1d(x, kR);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(std::fabs(slope * kR - 2.0) < 0.01);
}

TEST_CASE("implicit mean-hop equation for the baseline model") {
  for (double lam : {0.04, 0.12, 0.4}) {
    double d = furthest_dbar_implicit(lam);
    CHECK(d > 0.0);
    CHECK(d < 1.0 / lam);
    double lhs = std::log(1.0 - lam * d / (lam - lam * d - 1.0)) / lam;
    CHECK(std::fabs(lhs - d) < 1e-9);
  }
  CHECK(furthest_dbar_implicit(0.04) == doctest::Approx(0.66765724644433966).epsilon(1e-8));
  // No positive root once the log argument leaves its domain immediately.
  CHECK_THROWS_AS(furthest_dbar_implicit(2.0), BracketError);
}

TEST_CASE("2-D random-policy approximation uses the dimensionally consistent slope") {
  CHECK(n_random_2d_approx(0.0, kR) == doctest::Approx(9.0 / 16.0).epsilon(1e-14));
  CHECK(n_random_2d_approx(250.0, kR) == doctest::Approx(1.5 + 9.0 / 16.0).epsilon(1e-14));
  CHECK(n_random_2d_approx(500.0, kR) == doctest::Approx(3.5625).epsilon(1e-14));
  CHECK_THROWS_AS(n_random_2d_approx(-1.0, kR), std::domain_error);
}

TEST_CASE("2-D furthest mean distance, exact and bound-based") {
  double ex = e_xf2d(2e-4, kPi / 3, kR, Exf2dMode::Exact);
  double ap = e_xf2d(2e-4, kPi / 3, kR, Exf2dMode::Approx);
  CHECK(ex == doctest::Approx(229.16612866976866).epsilon(1e-9));
  CHECK(ap == doctest::Approx(212.16265738362191).epsilon(1e-12));
  CHECK(e_xf2d(1.5e-4, 2 * kPi / 3, kR, Exf2dMode::Exact) ==
        doctest::Approx(236.48861055627606).epsilon(1e-9));

  // Exact >= Approx everywhere (the subtracted term is upper-bounded).
  for (double lam : {1e-4, 2e-4, 5e-4, 1e-3, 5e-3})
    for (double th : {kPi / 6, kPi / 3, 2 * kPi / 3, kPi})
      CHECK(e_xf2d(lam, th, kR, Exf2dMode::Exact) >=
            e_xf2d(lam, th, kR, Exf2dMode::Approx));

  // Dense limit: both modes approach R.
  CHECK(e_xf2d(1.0, kPi / 3, kR, Exf2dMode::Exact) == doctest::Approx(kR).epsilon(1e-4));
  CHECK(e_xf2d(1.0, kPi / 3, kR, Exf2dMode::Approx) == doctest::Approx(kR).epsilon(1e-4));
  CHECK_THROWS_AS(e_xf2d(0.0, kPi / 3, kR, Exf2dMode::Exact), std::domain_error);
}

TEST_CASE("2-D second moment tracks R * E[X] as density grows") {
  // |E[X^2] - R E[X]| / E[X^2] decreases in s = (theta/2) lambda R^2 and is
  // the bound-vs-integral gap; it crosses 2% near s ~ 26, not at s = 10.
  double prev = 1.0;
  for (double s : {5.0, 10.0, 15.0, 26.0, 40.0, 60.0}) {
    double th = kPi / 3;
    double lam = s / (0.5 * th * kR * kR);
    double m2 = xf2d_second_moment(lam, th, kR);
    double ex = e_xf2d(lam, th, kR, Exf2dMode::Exact);
    double ratio = std::fabs(m2 - kR * ex) / m2;
    CHECK(ratio < prev);
    if (s >= 26.0) CHECK(ratio < 0.02);
    prev = ratio;
  }
}

TEST_CASE("2-D furthest-policy linear approximation composition") {
  double mean = e_xf2d(2e-4, kPi / 3, kR, Exf2dMode::Exact);
  CHECK(n_furthest_2d_approx(0.0, 2e-4, kPi / 3, kR) ==
        doctest::Approx(0.5 * kR / mean).epsilon(1e-12));
  CHECK(n_furthest_2d_approx(500.0, 2e-4, kPi / 3, kR) ==
        doctest::Approx(2.7272791298954701).epsilon(1e-9));
}
