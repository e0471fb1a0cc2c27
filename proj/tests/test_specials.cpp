#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cyclequeue/specials.hpp"

using namespace cq;

TEST_CASE("poisson pmf against direct evaluation") {
  // e^-2 * 2^3 / 6, written out
  CHECK(poisson_pmf(2.0, 3) ==
        doctest::Approx(std::exp(-2.0) * 8.0 / 6.0).epsilon(1e-14));
  CHECK(poisson_pmf(1.0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  // normalization over a generous range
  double s = 0.0;
  for (long long c = 0; c <= 60; ++c) s += poisson_pmf(3.5, c);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(poisson_pmf(-1.0, 0), std::domain_error);
  CHECK_THROWS_AS(poisson_pmf(1.0, -2), std::domain_error);
}

TEST_CASE("poisson tail is a forward sum consistent with the pmf") {
  double rho = 2.7;
  for (long long c : {0LL, 1LL, 5LL, 20LL}) {
    double direct = 0.0;
    for (long long j = c + 1; j <= c + 300; ++j) direct += poisson_pmf(rho, j);
    CHECK(poisson_tail(rho, c) == doctest::Approx(direct).epsilon(1e-13));
  }
  // far tail keeps relative accuracy (no 1-sum cancellation)
  double t40 = poisson_tail(1.0, 40);
  CHECK(t40 > 0.0);
  CHECK(t40 == doctest::Approx(poisson_pmf(1.0, 41) * (1 + 1.0 / 42.0))
                   .epsilon(1e-3));
}

TEST_CASE("harmonic numbers, exact rational oracle") {
  CHECK(harmonic(1) == doctest::Approx(1.0).epsilon(1e-15));
  // h_10 = 7381/2520
  CHECK(harmonic(10) == doctest::Approx(7381.0 / 2520.0).epsilon(1e-15));
  CHECK(harmonic(10) == doctest::Approx(2.9289682539682538).epsilon(1e-14));
  CHECK_THROWS_AS(harmonic(0), std::domain_error);
}

TEST_CASE("kummer series closed forms") {
  // M(a, a, z) = e^z
  CHECK(kummer_m(2.5, 2.5, 1.3) ==
        doctest::Approx(std::exp(1.3)).epsilon(1e-12));
  // M(1, 2, 1) = e - 1
  CHECK(kummer_m(1.0, 2.0, 1.0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  // M(1, 2, z) = (e^z - 1)/z
  CHECK(kummer_m(1.0, 2.0, -0.7) ==
        doctest::Approx((std::exp(-0.7) - 1.0) / -0.7).epsilon(1e-12));
  CHECK_THROWS_AS(kummer_m(1.0, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(kummer_m(1.0, -3.0, 1.0), std::domain_error);
}

TEST_CASE("kummer contiguous relation M(a,b,z) - M(a-1,b,z) = (z/b) M(a,b+1,z)") {
  for (double a : {0.3, 1.7, 4.0}) {
    for (double b : {0.9, 2.2, 6.5}) {
      for (double z : {-2.0, 0.4, 3.1}) {
        double lhs = kummer_m(a, b, z) - kummer_m(a - 1.0, b, z);
        double rhs = z / b * kummer_m(a, b + 1.0, z);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("exponential integral E1") {
  // value frozen from the defining integral (30-digit arithmetic)
  CHECK(exp_integral_e1(1.0) ==
        doctest::Approx(0.21938393439552027).epsilon(1e-12));
  // independent oracle: adaptive quadrature of the defining integral,
  // |e^-s / s| <= e^-s / x for s >= x
  QuadratureSpec tight;
  tight.abs_tol = 1e-13;
  tight.rel_tol = 1e-12;
  for (double x : {0.25, 1.0, 2.0, 6.0}) {
    double oracle = integrate_to_inf(
        [](double s) { return std::exp(-s) / s; }, x, 1.0 / x, 1.0, tight);
    CHECK(exp_integral_e1(x) == doctest::Approx(oracle).epsilon(1e-10));
  }
  // x e^x E1(x) -> 1
  double x = 30.0;
  CHECK(x * std::exp(x) * exp_integral_e1(x) ==
        doctest::Approx(0.9686921627694038).epsilon(1e-10));
  CHECK(std::abs(x * std::exp(x) * exp_integral_e1(x) - 1.0) < 0.05);
  CHECK_THROWS_AS(exp_integral_e1(0.0), std::domain_error);
}

TEST_CASE("regularized incomplete gamma") {
  // P(1, x) = 1 - e^-x
  CHECK(gamma_p(1.0, 0.8) ==
        doctest::Approx(1.0 - std::exp(-0.8)).epsilon(1e-13));
  // P(1/2, x) = erf(sqrt(x))
  CHECK(gamma_p(0.5, 2.0) ==
        doctest::Approx(std::erf(std::sqrt(2.0))).epsilon(1e-12));
  CHECK(gamma_p(3.0, 1e4) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gamma_q(2.0, 0.0) == 1.0);
  for (double a : {0.5, 1.0, 4.0, 12.0})
    for (double x : {0.1, 1.0, 5.0, 20.0})
      CHECK(gamma_p(a, x) + gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quadrature closed forms") {
  // polynomial of degree 3 is exact for Simpson
  auto cubic = [](double x) { return 2.0 * x * x * x - x * x + 3.0 * x - 5.0; };
  // antiderivative: x^4/2 - x^3/3 + 3x^2/2 - 5x
  auto F = [](double x) {
    return x * x * x * x / 2.0 - x * x * x / 3.0 + 1.5 * x * x - 5.0 * x;
  };
  CHECK(integrate(cubic, -1.0, 2.5) ==
        doctest::Approx(F(2.5) - F(-1.0)).epsilon(1e-13));

  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
        doctest::Approx(2.0).epsilon(1e-10));

  // semi-infinite: int_0^inf e^-t = 1
  CHECK(integrate_to_inf([](double t) { return std::exp(-t); }, 0.0, 1.0, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // int_0^inf t e^{-2t} = 1/4, bound t e^{-2t} <= (1/e) e^{-t}
  CHECK(integrate_to_inf([](double t) { return t * std::exp(-2.0 * t); }, 0.0,
                         1.0 / std::exp(1.0), 1.0) ==
        doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("quadrature reports depth exhaustion with best estimate") {
  // near-singular spike the depth cap cannot resolve
  QuadratureSpec spec;
  spec.abs_tol = 1e-14;
  spec.rel_tol = 1e-14;
  spec.max_depth = 3;
  bool threw = false;
  try {
    integrate([](double x) { return 1.0 / std::sqrt(x + 1e-12); }, 0.0, 1.0,
              spec);
  } catch (const NumericError& e) {
    threw = true;
    CHECK(e.best_estimate() > 0.0);
    CHECK(e.error_bound() > 0.0);
  }
  CHECK(threw);
}

TEST_CASE("find_root closed forms") {
  RootSpec s1;
  s1.lo = 0.0;
  s1.hi = 2.0;
  CHECK(find_root([](double x) { return std::exp(x) - 2.0; }, s1) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-10));
  RootSpec s2;
  s2.lo = 1.0;
  s2.hi = 2.0;
  CHECK(find_root([](double x) { return std::cos(x); }, s2) ==
        doctest::Approx(M_PI / 2.0).epsilon(1e-10));
  RootSpec s3;
  s3.lo = 3.0;
  s3.hi = 4.0;
  CHECK_THROWS_AS(find_root([](double x) { return x * x; }, s3),
                  std::domain_error);
}
