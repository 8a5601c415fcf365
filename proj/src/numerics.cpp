#include "mhcap/numerics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mhcap/errors.hpp"

namespace mhcap::num {

double gammln(double x) { return std::lgamma(x); }

namespace {

// Series representation, valid for x < a + 1.
double gser(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * std::numeric_limits<double>::epsilon())
      return sum * std::exp(-x + a * std::log(x) - gammln(a));
  }
  throw ConvergenceError("gammp: series failed to converge", std::fabs(del / sum));
}

// Continued fraction for Q(a, x), valid for x >= a + 1.
double gcf(double a, double x) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double fpmin = std::numeric_limits<double>::min() / eps;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= eps)
      return std::exp(-x + a * std::log(x) - gammln(a)) * h;
  }
  throw ConvergenceError("gammp: continued fraction failed to converge", 0.0);
}

}  // namespace

double gammp(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || std::isnan(a) || std::isnan(x))
    throw std::domain_error("gammp: require a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gser(a, x);
  return 1.0 - gcf(a, x);
}

namespace {

struct SimpsonCtx {
  const std::function<double(double)>& f;
  double rel_tol;
  int max_depth;
  double scale;  // magnitude reference for the relative test
};

double simpson_step(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const SimpsonCtx& ctx, double a, double fa, double m, double fm,
             double b, double fb, double whole, int depth, double* worst) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = ctx.f(lm), frm = ctx.f(rm);
  double left = simpson_step(a, fa, flm, m, fm);
  double right = simpson_step(m, fm, frm, b, fb);
  double err = (left + right - whole) / 15.0;
  double tol = ctx.rel_tol * std::max(ctx.scale, std::fabs(left + right));
  if (std::fabs(err) <= tol || depth >= ctx.max_depth) {
    if (depth >= ctx.max_depth) {
      double rel = std::fabs(err) / std::max(ctx.scale, 1e-300);
      if (rel > *worst) *worst = rel;
    }
    return left + right + err;
  }
  return adapt(ctx, a, fa, lm, flm, m, fm, left, depth + 1, worst) +
         adapt(ctx, m, fm, rm, frm, b, fb, right, depth + 1, worst);
}

}  // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a,
                            double b, double rel_tol, int max_depth) {
  if (a == b) return {0.0, 0.0};
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = simpson_step(a, fa, fm, b, fb);
  SimpsonCtx ctx{f, rel_tol, max_depth, std::fabs(whole)};
  double worst = 0.0;
  double v = adapt(ctx, a, fa, m, fm, b, fb, whole, 0, &worst);
  if (worst > rel_tol) {
    std::ostringstream msg;
    msg << "adaptive_simpson: requested rel tol " << rel_tol
        << " not met, achieved " << worst;
    throw ConvergenceError(msg.str(), worst);
  }
  return {v, worst};
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double x_tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw BracketError("bisect: interval does not bracket a sign change");
  for (int i = 0; i < max_iter && (hi - lo) > x_tol; ++i) {
    double mid = 0.5 * (lo + hi);
    double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> bracket_scan(const std::function<double(double)>& f,
                                       double lo, double hi, int steps) {
  double a = lo;
  double fa = f(a);
  // Geometric sweep so that roots close to lo are not stepped over.
  for (int i = 1; i <= steps; ++i) {
    double b = lo * std::pow(hi / lo, static_cast<double>(i) / steps);
    double fb = f(b);
    if (fa == 0.0) return {a, a};
    if ((fa > 0.0) != (fb > 0.0)) return {a, b};
    a = b;
    fa = fb;
  }
  throw BracketError("bracket_scan: no sign change in the scanned interval");
}

}  // namespace mhcap::num
