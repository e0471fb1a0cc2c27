#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "cyclequeue/mc.hpp"
#include "cyclequeue/specials.hpp"

using namespace cq;
using namespace cq::mc;

TEST_CASE("pairwise sum is deterministic and accurate") {
  std::vector<double> v(100001);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = (i % 2 == 0 ? 1.0 : -1.0) + 1e-9;
  double s = pairwise_sum(v);
  CHECK(s == doctest::Approx(1.0 + 100001 * 1e-9).epsilon(1e-9));
  CHECK(pairwise_sum(v) == s);
}

TEST_CASE("estimate reproduces a known mean and is thread-count invariant") {
  auto sampler = [](Rng& rng) { return rng.uniform01(); };
  McEstimate a = estimate(50000, 42, sampler);
  CHECK(std::abs(a.mean - 0.5) < 4.0 * a.stderr_);
  CHECK(a.n == 50000);
  CHECK(a.seed_provenance == "master=42 reps=50000");

  // identical digits with a different worker cap
#ifndef _WIN32
  setenv("CYCLEQUEUE_THREADS", "1", 1);
  McEstimate b = estimate(50000, 42, sampler);
  unsetenv("CYCLEQUEUE_THREADS");
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_ == b.stderr_);
#endif
}

TEST_CASE("estimate_vec columns match scalar runs") {
  auto vec_sampler = [](Rng& rng, std::vector<double>& out) {
    double u = rng.uniform01();
    out[0] = u;
    out[1] = u * u;
  };
  auto cols = estimate_vec(20000, 11, 2, vec_sampler);
  McEstimate first = estimate(20000, 11, [](Rng& rng) { return rng.uniform01(); });
  CHECK(cols[0].mean == first.mean);
  CHECK(std::abs(cols[1].mean - 1.0 / 3.0) < 4.0 * cols[1].stderr_);
}

TEST_CASE("batch means on a deterministic sawtooth") {
  // value = 1 on [i, i+0.5), 0 on [i+0.5, i+1): time average exactly 0.5,
  // identical in every batch, so stderr must be ~0
  std::vector<std::pair<double, double>> jumps;
  for (int i = 0; i < 100; ++i) {
    jumps.push_back({static_cast<double>(i), 1.0});
    jumps.push_back({i + 0.5, 0.0});
  }
  McEstimate est = batch_means(jumps, 0.0, 100.0, 10);
  CHECK(est.mean == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(est.stderr_ < 1e-12);
  CHECK_THROWS_AS(batch_means(jumps, 0.0, 100.0, 5), std::domain_error);
}

TEST_CASE("batch means flags uncovered spans") {
  BatchAccumulator acc(0.0, 10.0, 10);
  acc.add_segment(0.0, 4.0, 1.0);
  CHECK_THROWS_AS(acc.finish(), std::domain_error);
}

TEST_CASE("z test edge cases") {
  McEstimate est;
  est.mean = 1.0;
  est.stderr_ = 0.1;
  est.n = 100;
  CHECK(z_test(est, 1.2, 4.0).pass);
  CHECK_FALSE(z_test(est, 2.0, 4.0).pass);
  est.stderr_ = 0.0;
  CHECK(z_test(est, 1.0).pass);
  CHECK_FALSE(z_test(est, 1.0000001).pass);
}

TEST_CASE("chi-square threshold values") {
  // frozen reference quantiles at p = 0.001
  CHECK(chi_square_upper_quantile(1e-3, 1) ==
        doctest::Approx(10.8275661707).epsilon(1e-6));
  CHECK(chi_square_upper_quantile(1e-3, 5) ==
        doctest::Approx(20.5150056524).epsilon(1e-6));
  CHECK(chi_square_upper_quantile(1e-3, 10) ==
        doctest::Approx(29.5882984451).epsilon(1e-6));
  CHECK(kolmogorov_upper_quantile(1e-3) ==
        doctest::Approx(1.9494746035).epsilon(1e-6));
}

TEST_CASE("chi-square calibration and power on Poisson") {
  // samples drawn FROM the reference must pass (fixed seed)
  Rng rng(314159);
  std::vector<long long> samples(100000);
  for (auto& s : samples) s = rng.poisson(2.0);
  auto pmf = [](long long c) { return c < 0 ? 0.0 : poisson_pmf(2.0, c); };
  GofResult ok = chi_square_test(samples, pmf);
  CHECK(ok.pass);
  CHECK(ok.dof >= 3);

  // samples from Poisson(1) against Poisson(2) must fail at n = 1e5
  for (auto& s : samples) s = rng.poisson(1.0);
  GofResult bad = chi_square_test(samples, pmf);
  CHECK_FALSE(bad.pass);
}

TEST_CASE("ks calibration and power on exponential") {
  Rng rng(2718);
  std::vector<double> samples(20000);
  for (auto& s : samples) s = rng.exponential(1.0);
  auto cdf = [](double t) { return t <= 0.0 ? 0.0 : 1.0 - std::exp(-t); };
  CHECK(ks_test(samples, cdf).pass);

  for (auto& s : samples) s = rng.exponential(1.15);
  CHECK_FALSE(ks_test(samples, cdf).pass);
}
