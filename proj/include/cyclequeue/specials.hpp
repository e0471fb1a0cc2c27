#pragma once

#include <functional>
#include <stdexcept>
#include <string>

// Scalar special functions and the two generic numerical kernels (adaptive
// quadrature, bracketed root finding) everything downstream leans on. All
// functions are pure; failures are reported by exception, never by NaN.

namespace cq {

// Raised when an iteration/depth cap prevents meeting the error target.
// Carries the best estimate so a caller may still inspect it.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double best_estimate, double error_bound)
      : std::runtime_error(what), best_(best_estimate), bound_(error_bound) {}
  double best_estimate() const { return best_; }
  double error_bound() const { return bound_; }

 private:
  double best_;
  double bound_;
};

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_depth = 48;
};

struct RootSpec {
  double lo = 0.0;
  double hi = 1.0;
  double tol = 1e-12;     // width of the final bracket
  int max_iter = 200;
};

// log(n!)
double lfactorial(long long n);
// log C(n, k); requires 0 <= k <= n
double log_binomial(long long n, long long k);

// e^{-rho} rho^c / c!, evaluated in log space. rho > 0, c >= 0.
double poisson_pmf(double rho, long long c);
double log_poisson_pmf(double rho, long long c);

// P[Poisson(rho) > c] by forward summation from c+1 with a certified
// geometric tail bound (never the complement, so no cancellation).
double poisson_tail(double rho, long long c);

// h_k = sum_{i=1..k} 1/i, k >= 1. Summed smallest-first.
double harmonic(long long k);

// Confluent hypergeometric M(a, b, z) = sum_i (a)_i / (b)_i * z^i / i!.
// Plain series with term-ratio stopping; |z| <= 60 supported. b equal to a
// nonpositive integer is a domain error; exceeding the term cap before the
// stopping rule fires is a NumericError.
double kummer_m(double a, double b, double z);

// Exponential integral E1(x) = int_x^inf e^-s / s ds, x > 0.
// Series for x <= 1, continued fraction (modified Lentz) beyond.
double exp_integral_e1(double x);

// Regularized incomplete gamma P(a, x) and Q(a, x) = 1 - P(a, x), a > 0,
// x >= 0. Series for x < a + 1, continued fraction otherwise.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Adaptive Simpson on [a, b]. Exact (up to roundoff) on cubics. Stops when
// the local error estimate meets max(abs_tol, rel_tol * |estimate|); if
// max_depth is exhausted first, throws NumericError carrying the best
// estimate and the accumulated error bound.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

// int_a^inf f, given |f(t)| <= tail_coef * e^{-tail_rate * t} for all t >= a.
// Truncates where the certified tail is below abs_tol / 2, then integrates
// the finite part to abs_tol / 2.
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double tail_coef, double tail_rate,
                        const QuadratureSpec& spec = {});

// Brent root finding on a bracketing interval [spec.lo, spec.hi]; the
// endpoints must produce opposite signs (else domain error). Bisection
// fallback guarantees convergence.
double find_root(const std::function<double(double)>& f, const RootSpec& spec);

}  // namespace cq
