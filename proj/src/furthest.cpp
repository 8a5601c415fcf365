#include <mpfr.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mhcap/analytic.hpp"

namespace mhcap::analytic {

namespace {

// Minimal value-semantics wrapper around mpfr_t. All results carry the
// precision of their widest operand.
class Real {
 public:
  Real() { mpfr_init2(v_, 64); mpfr_set_zero(v_, 1); }
  explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(double d, mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_d(v_, d, MPFR_RNDN);
  }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, 64);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(Real o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

mpfr_prec_t join(const Real& a, const Real& b) {
  return std::max(a.prec(), b.prec());
}

Real operator+(const Real& a, const Real& b) {
  Real r(join(a, b));
  mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
Real operator-(const Real& a, const Real& b) {
  Real r(join(a, b));
  mpfr_sub(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
Real operator*(const Real& a, const Real& b) {
  Real r(join(a, b));
  mpfr_mul(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
Real operator/(const Real& a, const Real& b) {
  Real r(join(a, b));
  mpfr_div(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
Real operator-(const Real& a) {
  Real r(a.prec());
  mpfr_neg(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}
Real exp(const Real& a) {
  Real r(a.prec());
  mpfr_exp(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}
Real pow_ui(const Real& a, unsigned long e) {
  Real r(a.prec());
  mpfr_pow_ui(r.raw(), a.raw(), e, MPFR_RNDN);
  return r;
}
Real factorial(unsigned long k, mpfr_prec_t prec) {
  Real r(prec);
  mpfr_fac_ui(r.raw(), k, MPFR_RNDN);
  return r;
}

// Working precision for a table reaching branch n_max: the recursion forms
// C_n ~ e^{-n lambda R} out of terms of order e^{+n lambda R}, so the digits
// cancelled grow linearly in lambda * R * n.
mpfr_prec_t precision_for(double lambda, double r_tx, int n_max) {
  double bits = 192.0 + 1.6 * lambda * r_tx * (n_max + 2);
  if (bits > 1e7) bits = 1e7;
  return static_cast<mpfr_prec_t>(bits);
}

// C_1 .. C_{n_max} of the furthest-neighbor series, built iteratively; each
// C_n is pinned by value-continuity at x = (n-1) R.
struct CnTable {
  CnTable(double lambda, double r_tx, int n_max)
      : prec(precision_for(lambda, r_tx, n_max)),
        lam(lambda, prec),
        r(r_tx, prec),
        one(1.0, prec) {
    Real em = exp(-(lam * r));             // e^{-lambda R}
    psi_coeff = lam / (one - em);          // psi(x) = psi_coeff * x
    c.resize(static_cast<std::size_t>(n_max) + 1, Real(prec));
    c[1] = em;
    if (n_max >= 2) c[2] = exp(-psi(r)) * (psi(r) * c[1] + em - one) + c[1];
    for (int n = 3; n <= n_max; ++n) {
      Real rn1 = r * Real(n - 1.0, prec);  // R (n-1)
      Real sum(prec);
      for (int k = 1; k <= n - 2; ++k) {
        Real num = psi(rn1) * pow_ui(psi(r * Real(n - 1.0 - k, prec)), k - 1);
        Real den = factorial(k, prec) * exp(psi(r * Real(double(k), prec)));
        Real term = num / den * (c[n - k - 1] - c[n - k]);
        if (k % 2) term = -term;
        sum = sum + term;
      }
      c[n] = exp(-psi(rn1)) * (em - one) + c[n - 1] + sum;
    }
  }

  Real psi(const Real& x) const { return psi_coeff * x; }

  mpfr_prec_t prec;
  Real lam, r, one;
  Real psi_coeff;
  std::vector<Real> c;
};

}  // namespace

double c_n(int n, double lambda, double r_tx) {
  if (n < 1) throw std::domain_error("c_n: n must be >= 1");
  if (!(lambda > 0.0) || !(r_tx > 0.0))
    throw std::domain_error("c_n: lambda and r_tx must be positive");
  return CnTable(lambda, r_tx, n).c[n].to_double();
}

struct FurthestHopCurve::Impl {
  Impl(double lambda, double r_tx, int horizon)
      : lambda(lambda), r_tx(r_tx), horizon(horizon),
        table(lambda, r_tx, horizon),
        moments(furthest_moments_1d(lambda, r_tx)) {}

  double eval_exact(double x) const {
    int n = static_cast<int>(std::ceil(x / r_tx));
    const mpfr_prec_t prec = table.prec;
    // The series cancels through ~e^{lambda R n}-sized terms, so every term
    // must see bit-identical x: form x - kR in extended precision, never in
    // double.
    Real xr(x, prec);
    Real psi_x = table.psi(xr);
    Real em = exp(-(table.lam * table.r));
    Real acc =
        table.c[n] * exp(psi_x) + Real(double(n), prec) * (table.one - em);
    for (int k = 1; k < n; ++k) {
      Real shifted = table.psi(xr - table.r * Real(double(k), prec));
      Real term = psi_x * pow_ui(shifted, k - 1) / factorial(k, prec) *
                  exp(shifted) * table.c[n - k];
      if (k % 2) term = -term;
      acc = acc + term;
    }
    return acc.to_double();
  }

  double lambda, r_tx;
  int horizon;
  CnTable table;
  HopMoments moments;
};

FurthestHopCurve::FurthestHopCurve(double lambda, double r_tx, int horizon) {
  if (!(lambda > 0.0) || !(r_tx > 0.0))
    throw std::domain_error("FurthestHopCurve: lambda and r_tx must be positive");
  if (horizon < 1) throw std::domain_error("FurthestHopCurve: horizon must be >= 1");
  impl_ = std::make_unique<Impl>(lambda, r_tx, horizon);
}

FurthestHopCurve::~FurthestHopCurve() = default;
FurthestHopCurve::FurthestHopCurve(FurthestHopCurve&&) noexcept = default;
FurthestHopCurve& FurthestHopCurve::operator=(FurthestHopCurve&&) noexcept = default;

SeriesEval FurthestHopCurve::evaluate(double x) const {
  if (std::isnan(x)) throw std::domain_error("FurthestHopCurve: x is NaN");
  if (x < 0.0) return {0.0, false};
  if (x == 0.0) return {1.0, false};
  if (std::ceil(x / impl_->r_tx) > impl_->horizon) {
    return {linear_approx(x, impl_->moments.mean, impl_->moments.second_moment),
            true};
  }
  return {impl_->eval_exact(x), false};
}

double FurthestHopCurve::mean_hop() const { return impl_->moments.mean; }
double FurthestHopCurve::second_moment() const {
  return impl_->moments.second_moment;
}
double FurthestHopCurve::lambda() const { return impl_->lambda; }
double FurthestHopCurve::r_tx() const { return impl_->r_tx; }

}  // namespace mhcap::analytic
