#include "cyclequeue/specials.hpp"

#include <cmath>
#include <limits>

namespace cq {

double lfactorial(long long n) {
  if (n < 0) throw std::domain_error("lfactorial: n < 0");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(long long n, long long k) {
  if (k < 0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
  return lfactorial(n) - lfactorial(k) - lfactorial(n - k);
}

double log_poisson_pmf(double rho, long long c) {
  if (!(rho > 0.0)) throw std::domain_error("poisson_pmf: rho must be > 0");
  if (c < 0) throw std::domain_error("poisson_pmf: c must be >= 0");
  return -rho + static_cast<double>(c) * std::log(rho) - lfactorial(c);
}

double poisson_pmf(double rho, long long c) {
  return std::exp(log_poisson_pmf(rho, c));
}

double poisson_tail(double rho, long long c) {
  if (!(rho > 0.0)) throw std::domain_error("poisson_tail: rho must be > 0");
  if (c < 0) return 1.0;
  // Forward sum from c+1. The term ratio rho/(j+1) is < 1/2 once j+1 > 2*rho,
  // so the remainder after stopping is below term * ratio / (1 - ratio).
  double term = poisson_pmf(rho, c + 1);
  double sum = 0.0;
  for (long long j = c + 1;; ++j) {
    sum += term;
    double ratio = rho / static_cast<double>(j + 1);
    if (ratio < 0.5 && term * ratio / (1.0 - ratio) < 1e-18 * (sum + 1e-300)) break;
    if (j - c > 100000) throw NumericError("poisson_tail: term cap", sum, term);
    term *= ratio;
  }
  return sum;
}

double harmonic(long long k) {
  if (k < 1) throw std::domain_error("harmonic: k must be >= 1");
  double s = 0.0;
  for (long long i = k; i >= 1; --i) s += 1.0 / static_cast<double>(i);
  return s;
}

double kummer_m(double a, double b, double z) {
  if (b <= 0.0 && b == std::floor(b))
    throw std::domain_error("kummer_m: b is a nonpositive integer");
  double term = 1.0;
  double sum = 1.0;
  int small_streak = 0;
  for (int i = 0; i < 10000; ++i) {
    term *= (a + i) / (b + i) * z / (i + 1);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) {
      if (++small_streak == 3) return sum;
    } else {
      small_streak = 0;
    }
  }
  throw NumericError("kummer_m: series term cap reached", sum, std::abs(term));
}

double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: x must be > 0");
  if (x <= 1.0) {
    // E1(x) = -gamma - log x + sum_{k>=1} (-1)^{k+1} x^k / (k * k!)
    constexpr double euler_gamma = 0.57721566490153286060651209008240243;
    double sum = 0.0, term = 1.0;
    for (int k = 1; k <= 60; ++k) {
      term *= -x / k;
      double add = -term / k;
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return -euler_gamma - std::log(x) + sum;
  }
  // Continued fraction e^{-x}/(x+1- 1/(x+3- 4/(x+5- 9/(x+7- ...)))), Lentz.
  const double tiny = 1e-300;
  double b = x + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 200; ++i) {
    double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return h * std::exp(-x);
  }
  throw NumericError("exp_integral_e1: continued fraction did not settle",
                     h * std::exp(-x), std::abs(h) * std::exp(-x));
}

namespace {

// Incomplete gamma by series: P(a,x) = x^a e^-x / Gamma(a+1) * sum x^n (a)_n^-1
double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw NumericError("gamma_p: series cap", sum, del);
}

// Q(a,x) by continued fraction, x >= a+1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw NumericError("gamma_q: continued fraction cap", h, std::abs(h));
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_p: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_q: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  double tol;  // absolute target for the whole integral
  int max_depth;
  double unresolved = 0.0;  // error bound carried by depth-capped intervals
};

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// Returns the refined estimate on [a,b]; eps is this interval's error budget.
double adapt(SimpsonState& st, double a, double b, double fa, double fm,
             double fb, double whole, double eps, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = st.f(lm), frm = st.f(rm);
  double left = simpson(fa, flm, fm, a, m);
  double right = simpson(fm, frm, fb, m, b);
  double delta = left + right - whole;
  // |S2 - S1| / 15 estimates the error of S2 (Richardson).
  if (std::abs(delta) <= 15.0 * eps || depth >= st.max_depth) {
    if (std::abs(delta) > 15.0 * eps) st.unresolved += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return adapt(st, a, m, fa, flm, fm, left, eps / 2.0, depth + 1) +
         adapt(st, m, b, fm, frm, fb, right, eps / 2.0, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
  if (!(b >= a)) throw std::domain_error("integrate: need b >= a");
  if (a == b) return 0.0;
  double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
  double coarse = simpson(fa, fm, fb, a, b);
  // The coarse estimate only sets the scale for the relative target; if the
  // refined value comes out on a different scale (peaked integrands), redo
  // with the corrected budget so the contract holds against the result.
  double scale = std::abs(coarse);
  double result = 0.0, unresolved = 0.0;
  for (int pass = 0; pass < 4; ++pass) {
    double tol = std::max(spec.abs_tol, spec.rel_tol * scale);
    SimpsonState st{f, tol, spec.max_depth};
    result = adapt(st, a, b, fa, fm, fb, coarse, tol, 0);
    unresolved = st.unresolved;
    if (std::abs(result) >= 0.5 * scale) break;
    scale = std::abs(result);
  }
  double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(result));
  if (unresolved > target)
    throw NumericError("integrate: max_depth exhausted before error target",
                       result, unresolved);
  return result;
}

double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double tail_coef, double tail_rate,
                        const QuadratureSpec& spec) {
  if (!(tail_rate > 0.0) || !(tail_coef >= 0.0))
    throw std::domain_error("integrate_to_inf: need tail_rate > 0, tail_coef >= 0");
  // coef * e^{-rate * T} / rate <= abs_tol / 2
  double cut =
      std::log(std::max(1.0, 2.0 * tail_coef / (tail_rate * spec.abs_tol))) /
      tail_rate;
  double upper = std::max(a + 1.0, cut);
  QuadratureSpec inner = spec;
  inner.abs_tol = spec.abs_tol / 2.0;
  return integrate(f, a, upper, inner);
}

double find_root(const std::function<double(double)>& f, const RootSpec& spec) {
  double a = spec.lo, b = spec.hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw std::domain_error("find_root: endpoints do not bracket a root");
  // Brent: keep b the best iterate, a the contrapoint.
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < spec.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a; fc = fa; d = b - a; e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                  0.5 * spec.tol;
    double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {  // secant
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {  // inverse quadratic
        double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d; d = p / q;
      } else {
        d = xm; e = d;
      }
    } else {
      d = xm; e = d;
    }
    a = b; fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw NumericError("find_root: iteration cap reached", b, std::abs(c - b));
}

}  // namespace cq
