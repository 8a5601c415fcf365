#pragma once

#include <cmath>
#include <functional>

namespace mhcap::num {

// Compensated accumulator (Neumaier variant) for alternating sums.
class KahanSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
// Series for x < a+1, continued fraction otherwise.
double gammp(double a, double x);

double gammln(double x);

struct QuadResult {
  double value;
  double achieved_rel_tol;
};

// Adaptive Simpson on [a, b]. Throws ConvergenceError when the requested
// relative tolerance is not met within the depth budget.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a,
                            double b, double rel_tol = 1e-10,
                            int max_depth = 48);

// Bisection on a bracketing interval [lo, hi] with f(lo) * f(hi) <= 0.
// Throws BracketError if the interval does not bracket a sign change.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double x_tol = 1e-13, int max_iter = 200);

// Scans (lo, hi] geometrically for a sign change of f starting from f(lo) and
// returns the bracketing pair; throws BracketError on failure.
std::pair<double, double> bracket_scan(const std::function<double(double)>& f,
                                       double lo, double hi, int steps = 64);

}  // namespace mhcap::num
