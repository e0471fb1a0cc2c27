#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "cyclequeue/tagged.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cyclequeue/mc.hpp"
#include "cyclequeue/rng.hpp"
#include "cyclequeue/specials.hpp"
#include "doctest.h"

using namespace cq;
using tagged::TaggedParams;

namespace {

TaggedParams permutation_params(double theta, long long K) {
  TaggedParams p{theta, {}};
  for (long long i = 1; i <= K; ++i)
    p.rates.push_back(static_cast<double>(i));
  return p;
}

double sample_correlation(const std::vector<double>& a,
                          const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("passage-time laws phi and psi") {
  const auto p = permutation_params(1.0, 5);
  const auto at0 = tagged::phi_psi(p, 2, 5, 0.0);
  CHECK(at0.phi == 0.0);
  CHECK(at0.psi == 0.0);
  const auto late = tagged::phi_psi(p, 2, 5, 30.0);
  CHECK(late.phi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(late.psi == doctest::Approx(1.0).epsilon(1e-12));

  // j=1, k=2 at x = 1/2
  const auto mid = tagged::phi_psi(permutation_params(1.0, 2), 1, 2,
                                   std::log(2.0));
  CHECK(mid.phi == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(mid.psi == doctest::Approx(0.5).epsilon(1e-13));

  // psi is the (k-j)-th order-statistic CDF of k-1 uniforms
  const double t = 0.9, x = -std::expm1(-t);
  double direct = 0.0;
  for (long long i = 3; i <= 4; ++i)
    direct += std::exp(log_binomial(4, i)) * std::pow(x, double(i)) *
              std::pow(1.0 - x, double(4 - i));
  CHECK(tagged::phi_psi(p, 2, 5, t).psi ==
        doctest::Approx(direct).epsilon(1e-13));

  double prev = 0.0;
  for (double s : {0.2, 0.6, 1.2, 2.5, 5.0}) {
    const double v = tagged::phi_psi(p, 2, 5, s).psi;
    CHECK(v > prev);
    prev = v;
  }

  CHECK_THROWS_AS(tagged::phi_psi(p, 0, 2, 1.0), std::domain_error);
  CHECK_THROWS_AS(tagged::phi_psi(p, 2, 2, 1.0), std::domain_error);
  CHECK_THROWS_AS(tagged::phi_psi(p, 1, 6, 1.0), std::domain_error);
  CHECK_THROWS_AS(tagged::phi_psi(p, 1, 2, -0.1), std::domain_error);
  CHECK_THROWS_AS(
      tagged::phi_psi(TaggedParams{1.0, {1.0, 3.0}}, 1, 2, 1.0),
      std::domain_error);
}

TEST_CASE("phi and psi against direct passage simulation") {
  // from entering phase j: enters phase k at S = Exp(j)+..+Exp(k-1), sits
  // in k until S + Exp(k)
  const auto p = permutation_params(1.0, 5);
  const long long j = 2, k = 5;
  const double t = 0.9;
  const auto closed = tagged::phi_psi(p, j, k, t);
  const long long n = 200000;
  std::vector<double> entered(n), inside(n), entry_times(n);
  mc::parallel_for(n, [&](long long i) {
    Rng rng = derive_stream(424242, static_cast<std::uint64_t>(i));
    double s = 0.0;
    for (long long m = j; m < k; ++m)
      s += rng.exponential(static_cast<double>(m));
    const double leave = s + rng.exponential(static_cast<double>(k));
    entry_times[i] = s;
    entered[i] = s <= t ? 1.0 : 0.0;
    inside[i] = (s < t && t < leave) ? 1.0 : 0.0;
  });
  CHECK(mc::z_test(mc::from_values(entered), closed.psi).pass);
  CHECK(mc::z_test(mc::from_values(inside), closed.phi).pass);
  CHECK(mc::ks_test(entry_times, [&](double s) {
          return s < 0.0 ? 0.0 : tagged::phi_psi(p, j, k, s).psi;
        }).pass);
}

TEST_CASE("joint pgf: marginals, covariance, quadrature route") {
  const auto p = permutation_params(1.0, 4);
  CHECK(tagged::joint_pgf(p, 1, 3, 1.0, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-11));
  for (double x : {0.0, 0.4, 0.8})
    for (long long k : {2LL, 4LL}) {
      CHECK(tagged::joint_pgf(p, 1, k, x, 1.0) ==
            doctest::Approx(std::exp(x - 1.0)).epsilon(1e-10));
      CHECK(tagged::joint_pgf(p, 1, k, 1.0, x) ==
            doctest::Approx(std::exp((x - 1.0) / static_cast<double>(k)))
                .epsilon(1e-10));
    }

  // mixed factorial moment by one-sided differences, twice Richardson
  // extrapolated, minus the product of means
  const long long j = 1, k = 2;
  auto mixed_fd = [&](double h) {
    return (tagged::joint_pgf(p, j, k, 1.0, 1.0) -
            tagged::joint_pgf(p, j, k, 1.0 - h, 1.0) -
            tagged::joint_pgf(p, j, k, 1.0, 1.0 - h) +
            tagged::joint_pgf(p, j, k, 1.0 - h, 1.0 - h)) /
           (h * h);
  };
  const double h = 4e-3;
  const double f1 = mixed_fd(h), f2 = mixed_fd(2.0 * h),
               f4 = mixed_fd(4.0 * h);
  const double r_h = 2.0 * f1 - f2;    // kills the O(h) term
  const double r_2h = 2.0 * f2 - f4;
  const double extrapolated = (4.0 * r_h - r_2h) / 3.0;  // kills O(h^2)
  const double rho_j = p.theta / static_cast<double>(j);
  const double rho_k = p.theta / static_cast<double>(k);
  const double cov_fd = extrapolated - rho_j * rho_k;
  CHECK(cov_fd ==
        doctest::Approx(tagged::covariance(p, j, k)).epsilon(6e-6));

  // cov = rho_j int phi d psi, integrated in the substituted variable
  for (long long kk = 2; kk <= 4; ++kk)
    for (long long jj = 1; jj < kk; ++jj) {
      const double quad =
          rho_j * static_cast<double>(j) / static_cast<double>(jj) *
          integrate(
              [&](double u) {
                const double t = u >= 1.0 ? 1e300 : -std::log1p(-u);
                const auto pp = tagged::phi_psi(p, jj, kk, t);
                const double dens =
                    std::exp(lfactorial(kk - 1) - lfactorial(kk - jj - 1) -
                             lfactorial(jj - 1)) *
                    std::pow(u, static_cast<double>(kk - jj - 1)) *
                    std::pow(1.0 - u, static_cast<double>(jj - 1));
                return pp.phi * dens;
              },
              0.0, 1.0, QuadratureSpec{1e-12, 1e-11, 48});
      CHECK(quad ==
            doctest::Approx(tagged::covariance(p, jj, kk)).epsilon(1e-8));
    }

  CHECK_THROWS_AS(tagged::joint_pgf(p, 1, 2, -0.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(tagged::joint_pgf(p, 1, 2, 0.5, 1.1), std::domain_error);
}

TEST_CASE("covariance and correlation closed forms") {
  const auto p1 = permutation_params(1.0, 10);
  CHECK(tagged::covariance(p1, 1, 2) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  // linear in theta
  const auto p3 = permutation_params(3.0, 10);
  for (long long k = 2; k <= 6; ++k)
    CHECK(tagged::covariance(p3, 1, k) ==
          doctest::Approx(3.0 * tagged::covariance(p1, 1, k))
              .epsilon(1e-13));
  // symmetry j <-> k-j
  for (long long k = 2; k <= 10; ++k)
    for (long long j = 1; j < k; ++j)
      CHECK(tagged::covariance(p1, j, k) ==
            doctest::Approx(tagged::covariance(p1, k - j, k))
                .epsilon(1e-12));

  CHECK(tagged::correlation(1, 2) ==
        doctest::Approx(std::sqrt(2.0) / 6.0).epsilon(1e-14));
  CHECK(tagged::correlation(1, 2) ==
        doctest::Approx(0.2357022603955158).epsilon(1e-14));
  CHECK(tagged::correlation(2, 5) ==
        doctest::Approx(0.1505846504842085).epsilon(1e-13));
  CHECK(tagged::correlation(1, 4) ==
        doctest::Approx(1.0 / 7.0).epsilon(1e-14));
  for (long long k = 2; k <= 10; ++k)
    CHECK(tagged::correlation(1, k) ==
          doctest::Approx(std::sqrt(static_cast<double>(k)) /
                          (2.0 * (2.0 * static_cast<double>(k) - 1.0)))
              .epsilon(1e-12));
  // corr = cov / sqrt(rho_j rho_k) for any theta
  for (double theta : {0.5, 1.0, 3.0}) {
    const auto p = permutation_params(theta, 6);
    for (long long k = 2; k <= 6; ++k)
      for (long long j = 1; j < k; ++j) {
        const double rj = theta / static_cast<double>(j);
        const double rk = theta / static_cast<double>(k);
        CHECK(tagged::correlation(j, k) ==
              doctest::Approx(tagged::covariance(p, j, k) /
                              std::sqrt(rj * rk))
                  .epsilon(1e-12));
      }
  }
  // decay bound
  for (long long k = 2; k <= 10; ++k)
    for (long long j = 1; j < k; ++j)
      CHECK(tagged::correlation(j, k) <
            0.5 * std::sqrt(static_cast<double>(j) /
                            static_cast<double>(k)));
  CHECK_THROWS_AS(tagged::correlation(2, 2), std::domain_error);
  CHECK_THROWS_AS(tagged::covariance(TaggedParams{1.0, {1.0, 2.5}}, 1, 2),
                  std::domain_error);
}

TEST_CASE("interpolated correlation for general rates") {
  std::vector<double> integer_rates;
  for (long long i = 1; i <= 8; ++i)
    integer_rates.push_back(static_cast<double>(i));
  for (long long k = 2; k <= 8; ++k)
    for (long long j = 1; j < k; ++j)
      CHECK(tagged::lagrange_correlation(integer_rates, j, k) ==
            doctest::Approx(tagged::correlation(j, k)).epsilon(1e-9));

  // scale invariance
  const std::vector<double> base{0.7, 1.9, 3.2, 5.5};
  const double r0 = tagged::lagrange_correlation(base, 2, 4);
  for (double s : {0.5, 2.0}) {
    std::vector<double> scaled;
    for (double v : base) scaled.push_back(s * v);
    CHECK(tagged::lagrange_correlation(scaled, 2, 4) ==
          doctest::Approx(r0).epsilon(1e-10));
  }

  // two nodes: straight line through (mu_j^2, mu_j), (mu_k^2, mu_k) at 0
  const std::vector<double> two{3.0, 7.0};
  const double expected =
      (3.0 - (7.0 - 3.0) / (49.0 - 9.0) * 9.0) / (2.0 * std::sqrt(21.0));
  CHECK(tagged::lagrange_correlation(two, 1, 2) ==
        doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(tagged::lagrange_correlation({2.0, 2.0}, 1, 2),
                  std::domain_error);
  CHECK_THROWS_AS(tagged::lagrange_correlation(base, 0, 2),
                  std::domain_error);
  CHECK_THROWS_AS(tagged::lagrange_correlation(base, 1, 5),
                  std::domain_error);
}

TEST_CASE("tagged simulation: marginals and pair law for rates 1..2") {
  const auto p = permutation_params(1.0, 2);
  Rng rng(606001);
  const long long n = 300000;
  const auto obs = tagged::simulate_tagged(p, n, 30.0, rng);
  REQUIRE(static_cast<long long>(obs.size()) == n);
  std::vector<long long> l1(obs.size()), l2(obs.size());
  std::vector<double> product(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    REQUIRE(obs[i].occupancies.size() == 2);
    l1[i] = obs[i].occupancies[0];
    l2[i] = obs[i].occupancies[1];
    product[i] = static_cast<double>(l1[i]) * static_cast<double>(l2[i]);
  }
  CHECK(mc::chi_square_test(l1, [](long long c) {
          return c < 0 ? 0.0 : poisson_pmf(1.0, c);
        }).pass);
  CHECK(mc::chi_square_test(l2, [](long long c) {
          return c < 0 ? 0.0 : poisson_pmf(0.5, c);
        }).pass);
  // E[L1 L2] = rho_1 rho_2 + cov
  CHECK(mc::z_test(mc::from_values(product),
                   0.5 + tagged::covariance(p, 1, 2))
            .pass);
  // sample correlation against sqrt(2)/6 with the large-n normal se
  std::vector<double> d1(l1.begin(), l1.end()), d2(l2.begin(), l2.end());
  const double r = sample_correlation(d1, d2);
  const double target = tagged::correlation(1, 2);
  const double se = (1.0 - target * target) / std::sqrt(double(n));
  CHECK(std::fabs(r - target) < 4.0 * se);
}

TEST_CASE("tagged simulation: correlation decays along the tandem") {
  const auto p = permutation_params(1.0, 5);
  Rng rng(606002);
  const long long n = 200000;
  const auto obs = tagged::simulate_tagged(p, n, 20.0, rng);
  std::vector<double> l1(obs.size());
  std::vector<std::vector<double>> lk(4, std::vector<double>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) {
    l1[i] = static_cast<double>(obs[i].occupancies[0]);
    for (std::size_t k = 2; k <= 5; ++k)
      lk[k - 2][i] = static_cast<double>(obs[i].occupancies[k - 1]);
  }
  double prev = 1.0;
  for (std::size_t k = 2; k <= 5; ++k) {
    const double r = sample_correlation(l1, lk[k - 2]);
    const double target = tagged::correlation(1, static_cast<long long>(k));
    CHECK(std::fabs(r - target) < 0.01);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("tagged simulation with unequal rates matches the interpolant") {
  const TaggedParams p{2.0, {3.0, 7.0}};
  Rng rng(606003);
  const long long n = 250000;
  const auto obs = tagged::simulate_tagged(p, n, 5.0, rng);
  std::vector<double> product(obs.size());
  std::vector<long long> l2(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    product[i] = static_cast<double>(obs[i].occupancies[0]) *
                 static_cast<double>(obs[i].occupancies[1]);
    l2[i] = obs[i].occupancies[1];
  }
  const double rho1 = 2.0 / 3.0, rho2 = 2.0 / 7.0;
  const double cov = tagged::lagrange_correlation(p.rates, 1, 2) *
                     std::sqrt(rho1 * rho2);
  CHECK(mc::z_test(mc::from_values(product), rho1 * rho2 + cov).pass);
  CHECK(mc::chi_square_test(l2, [&](long long c) {
          return c < 0 ? 0.0 : poisson_pmf(rho2, c);
        }).pass);
}

TEST_CASE("tagged simulation edge cases and CSV layout") {
  const auto p = permutation_params(1.0, 3);
  Rng rng(606004);
  CHECK(tagged::simulate_tagged(p, 0, 1.0, rng).empty());
  CHECK_THROWS_AS(tagged::simulate_tagged(p, 5, -1.0, rng),
                  std::domain_error);
  CHECK_THROWS_AS(tagged::simulate_tagged(p, -1, 1.0, rng),
                  std::domain_error);
  CHECK_THROWS_AS(
      tagged::simulate_tagged(TaggedParams{1.0, {}}, 1, 1.0, rng),
      std::domain_error);

  const auto obs = tagged::simulate_tagged(p, 4, 2.0, rng);
  REQUIRE(obs.size() == 4);
  for (const auto& o : obs) {
    REQUIRE(o.occupancies.size() == 3);
    for (long long v : o.occupancies) CHECK(v >= 0);
  }
  std::ostringstream out;
  tagged::write_tagged_csv(out, obs);
  const std::string text = out.str();
  CHECK(text.rfind("tag_id,L1,L2,L3\n", 0) == 0);
  long long rows = -1;  // header
  for (char ch : text)
    if (ch == '\n') ++rows;
  CHECK(rows == 4);
  CHECK(text.find("\n0,") != std::string::npos);
}
