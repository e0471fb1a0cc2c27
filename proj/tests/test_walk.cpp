#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cyclequeue/mc.hpp"
#include "cyclequeue/specials.hpp"
#include "cyclequeue/walk.hpp"

using namespace cq;
using namespace cq::walk;

TEST_CASE("step probabilities") {
  WalkParams p{1.0};
  auto s0 = step_probs(p, 0);
  CHECK(s0.up == 1.0);
  CHECK(s0.down == 0.0);
  auto s3 = step_probs(p, 3);
  CHECK(s3.up == doctest::Approx(0.25));
  CHECK(s3.down == doctest::Approx(0.75));
  CHECK(s3.up + s3.down == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(step_probs(WalkParams{0.0}, 1), std::domain_error);
}

TEST_CASE("stationary law sums to 1 and satisfies detailed balance flow") {
  for (double rho : {0.4, 1.0, 3.2}) {
    WalkParams p{rho};
    double sum = 0.0;
    for (long long c = 0; c <= 200; ++c) sum += stationary_pmf(p, c);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    // alpha_0 = e^-rho / 2
    CHECK(stationary_pmf(p, 0) ==
          doctest::Approx(0.5 * std::exp(-rho)).epsilon(1e-13));
    // stationarity: alpha_c = alpha_{c-1} p_{c-1} + alpha_{c+1} q_{c+1}
    for (long long c = 1; c <= 30; ++c) {
      double inflow = stationary_pmf(p, c - 1) * step_probs(p, c - 1).up +
                      stationary_pmf(p, c + 1) * step_probs(p, c + 1).down;
      CHECK(stationary_pmf(p, c) == doctest::Approx(inflow).epsilon(1e-11));
    }
  }
}

TEST_CASE("mean excursion length closed forms") {
  WalkParams p{1.0};
  // E[kappa_0] = 2e - 1
  CHECK(mean_excursion_length(p, 0) ==
        doctest::Approx(2.0 * std::exp(1.0) - 1.0).epsilon(1e-12));
  // E[(kappa_0 - 1)/2] = e - 1 (up-move count = busy-period arrivals)
  CHECK((mean_excursion_length(p, 0) - 1.0) / 2.0 ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  for (double rho : {0.5, 2.0}) {
    WalkParams q{rho};
    CHECK(mean_excursion_length(q, 0) ==
          doctest::Approx(2.0 * std::exp(rho) - 1.0).epsilon(1e-12));
  }
}

TEST_CASE("renewal identity alpha_c p_c E[kappa_c] = sum_{j>c} alpha_j") {
  for (double rho : {0.7, 1.0, 2.5}) {
    WalkParams p{rho};
    for (long long c = 0; c <= 10; ++c) {
      double lhs = stationary_pmf(p, c) * step_probs(p, c).up *
                   mean_excursion_length(p, c);
      double rhs = 0.0;
      for (long long j = c + 1; j <= c + 250; ++j) rhs += stationary_pmf(p, j);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
  }
}

TEST_CASE("excursion length variance, frozen value at rho=1") {
  WalkParams p{1.0};
  // Var[(kappa_0 - 1)/2] = 7.93064832641766 (30-digit series evaluation)
  CHECK(var_excursion_length(p) / 4.0 ==
        doctest::Approx(7.93064832641766).epsilon(1e-10));
}

TEST_CASE("ruin probability: closed rational case and boundaries") {
  WalkParams p{1.0};
  // (ell, s, u) = (0, 1, 3): e / (e + e + 2e) = 1/4 exactly
  CHECK(ruin_probability(p, 0, 1, 3) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(ruin_probability(p, 0, 0, 5) == 0.0);
  CHECK(ruin_probability(p, 0, 5, 5) == 1.0);
  // monotone in s
  double prev = 0.0;
  for (long long s = 0; s <= 6; ++s) {
    double r = ruin_probability(p, 0, s, 6);
    CHECK(r >= prev);
    prev = r;
  }
  // large span stays finite and in (0,1)
  double r = ruin_probability(WalkParams{2.0}, 0, 3, 120);
  CHECK(r > 0.0);
  CHECK(r < 1.0);
  CHECK_THROWS_AS(ruin_probability(p, 2, 1, 3), std::domain_error);
}

TEST_CASE("ruin probability matches hitting-frequency MC") {
  WalkParams p{1.0};
  double target = ruin_probability(p, 0, 1, 3);  // = 1/4
  auto est = mc::estimate(200000, 4242, [&](Rng& rng) {
    return simulate_reaches_before(p, 1, 3, 0, rng) ? 1.0 : 0.0;
  });
  CHECK(mc::z_test(est, target).pass);

  WalkParams p2{1.7};
  double t2 = ruin_probability(p2, 1, 2, 5);
  auto est2 = mc::estimate(200000, 4343, [&](Rng& rng) {
    return simulate_reaches_before(p2, 2, 5, 1, rng) ? 1.0 : 0.0;
  });
  CHECK(mc::z_test(est2, t2).pass);
}

TEST_CASE("height tail and frozen moments at rho=1") {
  WalkParams p{1.0};
  // P[H_0 >= h+1] = 1/sum_{r<=h} r! at rho=1: h=0 -> 1, h=1 -> 1/2, h=2 -> 1/4, h=3 -> 1/10
  CHECK(height_tail(p, 0, 0) == doctest::Approx(1.0));
  CHECK(height_tail(p, 0, 1) == doctest::Approx(0.5));
  CHECK(height_tail(p, 0, 2) == doctest::Approx(0.25));
  CHECK(height_tail(p, 0, 3) == doctest::Approx(0.1));
  auto hm = height_moments(p);
  CHECK(hm.mean == doctest::Approx(1.88724287213901).epsilon(1e-10));
  CHECK(hm.variance == doctest::Approx(1.24227920433340).epsilon(1e-10));
  // deep tail underflows cleanly
  CHECK(height_tail(p, 0, 500) == 0.0);
}

TEST_CASE("excursion MC matches analytic length, up-move and height laws") {
  WalkParams p{1.0};
  const long long n = 300000;
  auto cols = mc::estimate_vec(n, 99, 4, [&](Rng& rng, std::vector<double>& out) {
    WalkExcursion ex = simulate_excursion(p, 0, rng);
    out[0] = static_cast<double>(ex.length);
    double centered = (static_cast<double>(ex.upmoves)) - (std::exp(1.0) - 1.0);
    out[1] = centered * centered;  // E = Var[upmoves] given exact mean
    out[2] = static_cast<double>(ex.height);
    out[3] = static_cast<double>(ex.length) ==
                     2.0 * static_cast<double>(ex.upmoves) + 1.0
                 ? 1.0
                 : 0.0;
  });
  CHECK(mc::z_test(cols[0], 2.0 * std::exp(1.0) - 1.0).pass);
  CHECK(mc::z_test(cols[1], 7.93064832641766).pass);
  auto hm = height_moments(p);
  CHECK(mc::z_test(cols[2], hm.mean).pass);
  CHECK(cols[3].mean == 1.0);  // parity identity holds pathwise
}

TEST_CASE("height distribution matches the tail formula (chi-square)") {
  WalkParams p{1.3};
  Rng rng(1234);
  std::vector<long long> heights(200000);
  for (auto& h : heights) h = simulate_excursion(p, 0, rng).height;
  auto pmf = [&](long long h) {
    if (h < 1) return 0.0;
    return height_tail(p, 0, h - 1) - height_tail(p, 0, h);
  };
  CHECK(mc::chi_square_test(heights, pmf).pass);
}

TEST_CASE("occupation fraction at 0 via batch means") {
  WalkParams p{1.0};
  Rng rng(31415);
  auto fractions = occupation_batches(p, 0, 10000000, 20, 0, rng);
  auto est = mc::from_values(fractions);
  CHECK(mc::z_test(est, stationary_pmf(p, 0)).pass);
}

TEST_CASE("park index arithmetic and domain") {
  WalkParams p{1.0};
  // frozen from the formula: I_m = 6, 7, 8 at m = 1e4, 1e6, 1e8
  CHECK(park_index(p, 10000) == 6);
  CHECK(park_index(p, 1000000) == 7);
  CHECK(park_index(p, 100000000) == 8);
  // rho too large for the window: log log m <= 1 + log rho
  CHECK_THROWS_AS(park_index(WalkParams{4.0}, 10000), std::domain_error);
}

TEST_CASE("running maximum concentrates near the park index") {
  WalkParams p{1.0};
  const long long m = 10000;
  long long target = park_index(p, m);
  // exact law of the max of m excursion heights: P[M <= h] = (1 - tail(h))^m
  auto cdf = [&](long long h) {
    return h < 0 ? 0.0 : std::pow(1.0 - height_tail(p, 0, h), double(m));
  };
  double window = cdf(target + 3) - cdf(target - 2);  // {I-1..I+3}
  CHECK(window > 0.95);  // the index pins the bulk of the law
  auto est = mc::estimate(2000, 7117, [&](Rng& rng) {
    long long mx = max_before_mth_return(p, m, rng);
    return (mx >= target - 1 && mx <= target + 3) ? 1.0 : 0.0;
  });
  CHECK(mc::z_test(est, window).pass);
  CHECK(est.mean > 0.9);
}
