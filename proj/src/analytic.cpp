#include "mhcap/analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mhcap/errors.hpp"
#include "mhcap/numerics.hpp"

namespace mhcap::analytic {

SeriesEval n_random_1d_eval(double x, double r_tx, int horizon) {
  if (!(r_tx > 0.0)) throw std::domain_error("n_random_1d: r_tx must be positive");
  if (std::isnan(x)) throw std::domain_error("n_random_1d: x is NaN");
  if (x < 0.0) return {0.0, false};
  if (x == 0.0) return {1.0, false};

  double t = x / r_tx;
  int branches = static_cast<int>(std::ceil(t));
  if (branches > horizon) {
    // Linear asymptote of the uniform renewal function.
    return {2.0 * t + 2.0 / 3.0, true};
  }
  num::KahanSum sum;
  double sign = 1.0;
  double fact = 1.0;  // k!
  for (int k = 0; k < branches; ++k) {
    double u = t - k;
    sum.add(sign / fact * std::pow(u, k) * std::exp(u));
    sign = -sign;
    fact *= k + 1;
  }
  return {sum.value(), false};
}

double n_random_1d(double x, double r_tx) {
  return n_random_1d_eval(x, r_tx).hops;
}

double psi(double x, double lambda, double r_tx) {
  if (!(lambda > 0.0)) throw std::domain_error("psi: lambda must be positive");
  if (!(r_tx > 0.0)) throw std::domain_error("psi: r_tx must be positive");
  return lambda * x / -std::expm1(-lambda * r_tx);
}

double n_furthest_1d(double x, double lambda, double r_tx) {
  return FurthestHopCurve(lambda, r_tx)(x);
}

double linear_approx(double x, double moment1, double moment2) {
  if (!(moment1 > 0.0))
    throw std::domain_error("linear_approx: first moment must be positive");
  if (moment2 < moment1 * moment1)
    throw std::domain_error("linear_approx: second moment below squared mean");
  return x / moment1 + moment2 / (2.0 * moment1 * moment1);
}

HopMoments furthest_moments_1d(double lambda, double r_tx) {
  if (!(lambda > 0.0) || !(r_tx > 0.0))
    throw std::domain_error("furthest_moments_1d: lambda and r_tx must be positive");
  double lr = lambda * r_tx;
  double one_minus_em = -std::expm1(-lr);  // keeps tiny lr fully accurate
  double mean = (lr + std::expm1(-lr)) / (lambda * one_minus_em);
  // E[X^2] = [R^2 e^{lr} - (2R/l) e^{lr} + 2 e^{lr}/l^2 - 2/l^2] / (e^{lr}-1),
  // rearranged around e^{-lr} so that large lr does not overflow.
  double l2 = lambda * lambda;
  double em = std::exp(-lr);
  double m2 = (r_tx * r_tx - 2.0 * r_tx / lambda + 2.0 / l2 - 2.0 * em / l2) /
              one_minus_em;
  return {mean, m2};
}

double gamma_baseline_hops(double distance_d, double lambda, double d_bar,
                           double tail_tol) {
  if (!(distance_d > 0.0) || !(lambda > 0.0) || !(d_bar > 0.0))
    throw std::domain_error("gamma_baseline_hops: all arguments must be positive");
  double beta = 1.0 + d_bar * lambda;
  double z = lambda * distance_d;
  long n_cap = 10L * static_cast<long>(std::ceil(distance_d / d_bar));
  if (n_cap < 10) n_cap = 10;

  double expected = 0.0;
  double head = num::gammp(beta, z);  // P(N_H = n) = head_n - head_{n+1}
  for (long n = 1;; ++n) {
    double tail = num::gammp((n + 1) * beta, z);
    expected += static_cast<double>(n) * (head - tail);
    head = tail;
    if (tail < tail_tol) break;
    if (n >= n_cap)
      throw ConvergenceError("gamma_baseline_hops: tail mass above tolerance at n cap", tail);
  }
  return expected;
}

double gamma_baseline_hops(const GammaBaselineParams& params, double lambda,
                           double tail_tol) {
  return gamma_baseline_hops(params.distance_d, lambda, params.d_bar, tail_tol);
}

double furthest_dbar_implicit(double lambda) {
  if (!(lambda > 0.0))
    throw std::domain_error("furthest_dbar_implicit: lambda must be positive");
  auto residual = [lambda](double d) {
    double ratio = 1.0 - lambda * d / (lambda - lambda * d - 1.0);
    if (!(ratio > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(ratio) / lambda - d;
  };
  // d = 0 is a trivial root; scan (0, 1/lambda) for the positive one.
  auto [lo, hi] = num::bracket_scan(residual, 1e-9 / lambda, 1.0 / lambda, 256);
  return num::bisect(residual, lo, hi, 1e-10 * (hi - lo) + 1e-16, 300);
}

double n_random_2d_approx(double x, double r_tx) {
  if (!(r_tx > 0.0)) throw std::domain_error("n_random_2d_approx: r_tx must be positive");
  if (x < 0.0) throw std::domain_error("n_random_2d_approx: x must be nonnegative");
  return 3.0 * x / (2.0 * r_tx) + 9.0 / 16.0;
}

double e_xf2d(double lambda, double theta, double r_tx, Exf2dMode mode) {
  if (!(lambda > 0.0) || !(theta > 0.0) || !(r_tx > 0.0))
    throw std::domain_error("e_xf2d: all arguments must be positive");
  double c = 0.5 * theta * lambda;
  double s = c * r_tx * r_tx;
  // R e^s/(e^s - 1) = R/(1 - e^{-s}), safe for large s.
  double first = r_tx / (-std::expm1(-s));
  if (mode == Exf2dMode::Approx) return first - 2.0 / (r_tx * lambda * theta);
  auto integrand = [c, s](double t) {
    // e^{c t^2} normalized by e^s so the quadrature never overflows.
    return std::exp(c * t * t - s);
  };
  auto q = num::adaptive_simpson(integrand, 0.0, r_tx, 1e-10);
  return first - q.value / (-std::expm1(-s));
}

double xf2d_second_moment(double lambda, double theta, double r_tx) {
  if (!(lambda > 0.0) || !(theta > 0.0) || !(r_tx > 0.0))
    throw std::domain_error("xf2d_second_moment: all arguments must be positive");
  double s = 0.5 * theta * lambda * r_tx * r_tx;
  return r_tx * r_tx / (-std::expm1(-s)) - 2.0 / (lambda * theta);
}

double n_furthest_2d_approx(double x, double lambda, double theta, double r_tx,
                            Exf2dMode mode) {
  if (!(x >= 0.0)) throw std::domain_error("n_furthest_2d_approx: x must be nonnegative");
  return (x + 0.5 * r_tx) / e_xf2d(lambda, theta, r_tx, mode);
}

}  // namespace mhcap::analytic
