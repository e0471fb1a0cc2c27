#include "cyclequeue/walk.hpp"

#include <cmath>
#include <stdexcept>

#include "cyclequeue/specials.hpp"

namespace cq::walk {

namespace {

void check(const WalkParams& params) {
  if (!(params.rho > 0.0)) throw std::domain_error("walk: rho must be > 0");
}

}  // namespace

StepProbs step_probs(const WalkParams& params, long long c) {
  check(params);
  if (c < 0) throw std::domain_error("step_probs: c must be >= 0");
  double denom = static_cast<double>(c) + params.rho;
  return {params.rho / denom, static_cast<double>(c) / denom};
}

double stationary_pmf(const WalkParams& params, long long c) {
  check(params);
  if (c < 0) throw std::domain_error("stationary_pmf: c must be >= 0");
  double rho = params.rho;
  // e^-rho (rho + c) rho^{c-1} / (2 c!)
  double lp = -rho + (static_cast<double>(c) - 1.0) * std::log(rho) -
              lfactorial(c);
  return 0.5 * (rho + static_cast<double>(c)) * std::exp(lp);
}

double mean_excursion_length(const WalkParams& params, long long c) {
  check(params);
  if (c < 0) throw std::domain_error("mean_excursion_length: c must be >= 0");
  // 1 + 2 P[Poisson(rho) > c] / pi_c
  return 1.0 + 2.0 * poisson_tail(params.rho, c) / poisson_pmf(params.rho, c);
}

double var_excursion_length(const WalkParams& params) {
  check(params);
  double rho = params.rho;
  double sum = 0.0;
  for (long long r = 0;; ++r) {
    double term = std::pow(poisson_tail(rho, r), 2) / poisson_pmf(rho, r);
    sum += term;
    if (r > rho && term < 1e-17 * sum) break;
    if (r > 100000)
      throw NumericError("var_excursion_length: series cap", sum, term);
  }
  return 4.0 * std::exp(rho) * (2.0 * rho - std::exp(rho) + 1.0) +
         8.0 * std::exp(rho) * sum;
}

double ruin_probability(const WalkParams& params, long long ell, long long s,
                        long long u) {
  check(params);
  if (!(0 <= ell && ell <= s && s <= u))
    throw std::domain_error("ruin_probability: need 0 <= ell <= s <= u");
  if (s == ell) return 0.0;
  if (s == u) return 1.0;
  // weights w_r = pi_{u-1} / pi_r accumulated downward from r = u-1
  // (w_{r-1} = w_r * rho / r), so the largest term is O(1) and the ratio is
  // stable for any ell, u at double precision.
  long double w = 1.0L, num = 0.0L, den = 0.0L;
  for (long long r = u - 1; r >= ell; --r) {
    den += w;
    if (r <= s - 1) num += w;
    if (r > ell) w *= static_cast<long double>(params.rho) / r;
  }
  return static_cast<double>(num / den);
}

double height_tail(const WalkParams& params, long long c, long long h) {
  check(params);
  if (c < 0 || h < 0) throw std::domain_error("height_tail: need c, h >= 0");
  // sum_{r=0}^{h} (c+1)_r / rho^r, term ratio (c+1+r)/rho
  long double term = 1.0L, sum = 0.0L;
  for (long long r = 0; r <= h; ++r) {
    sum += term;
    if (sum > 1e300L) return 0.0;  // tail underflows to 0
    term *= (static_cast<long double>(c) + 1.0L + r) / params.rho;
  }
  return static_cast<double>(1.0L / sum);
}

HeightMoments height_moments(const WalkParams& params) {
  check(params);
  HeightMoments hm;
  double second = 0.0;
  for (long long h = 0;; ++h) {
    double tail = height_tail(params, 0, h);
    hm.mean += tail;
    second += static_cast<double>(2 * h + 1) * tail;
    if (tail < 1e-18 * hm.mean) break;
    if (h > 100000) throw NumericError("height_moments: series cap", hm.mean, tail);
  }
  hm.variance = second - hm.mean * hm.mean;
  return hm;
}

long long park_index(const WalkParams& params, long long m) {
  check(params);
  if (m < 2) throw std::domain_error("park_index: m must be >= 2");
  double lm = std::log(static_cast<double>(m));
  double llm = std::log(lm);
  double denom = llm - 1.0 - std::log(params.rho);
  if (!(denom > 0.0))
    throw std::domain_error("park_index: need log log m > 1 + log rho");
  double num = lm - 0.5 * llm - 0.5 * std::log(2.0 * M_PI);
  return static_cast<long long>(std::floor(num / denom + 0.5));
}

WalkExcursion simulate_excursion(const WalkParams& params, long long c, Rng& rng,
                                 long long step_cap) {
  check(params);
  if (c < 0) throw std::domain_error("simulate_excursion: c must be >= 0");
  // kappa_c is the passage time from c+1 down to c, so length = 2*upmoves + 1
  // and at c=0 the up-move count matches the busy-period arrival count.
  WalkExcursion ex;
  long long state = c + 1;
  ex.height = 1;
  while (state != c) {
    if (ex.length >= step_cap)
      throw NumericError("simulate_excursion: step cap", 0.0,
                         static_cast<double>(ex.length));
    double denom = static_cast<double>(state) + params.rho;
    if (rng.uniform01() * denom < params.rho) {
      ++state;
      ++ex.upmoves;
      ex.height = std::max(ex.height, state - c);
    } else {
      --state;
    }
    ++ex.length;
  }
  return ex;
}

bool simulate_reaches_before(const WalkParams& params, long long start,
                             long long hi, long long lo, Rng& rng,
                             long long step_cap) {
  check(params);
  if (!(lo <= start && start <= hi && lo < hi))
    throw std::domain_error("simulate_reaches_before: need lo <= start <= hi");
  long long state = start;
  for (long long step = 0; step < step_cap; ++step) {
    if (state == hi) return true;
    if (state == lo) return false;
    double denom = static_cast<double>(state) + params.rho;
    if (rng.uniform01() * denom < params.rho)
      ++state;
    else
      --state;
  }
  throw NumericError("simulate_reaches_before: step cap", 0.0,
                     static_cast<double>(step_cap));
}

std::vector<double> occupation_batches(const WalkParams& params, long long state0,
                                       long long n_steps, int n_batches,
                                       long long level, Rng& rng) {
  check(params);
  if (state0 < 0 || level < 0)
    throw std::domain_error("occupation_batches: negative state");
  if (n_batches < 10)
    throw std::domain_error("occupation_batches: need at least 10 batches");
  if (n_steps < n_batches)
    throw std::domain_error("occupation_batches: too few steps");
  std::vector<double> fractions;
  fractions.reserve(static_cast<std::size_t>(n_batches));
  long long per = n_steps / n_batches;
  long long state = state0;
  for (int b = 0; b < n_batches; ++b) {
    long long hits = 0;
    for (long long i = 0; i < per; ++i) {
      if (state == level) ++hits;
      double denom = static_cast<double>(state) + params.rho;
      if (rng.uniform01() * denom < params.rho)
        ++state;
      else if (state > 0)
        --state;
    }
    fractions.push_back(static_cast<double>(hits) / static_cast<double>(per));
  }
  return fractions;
}

long long max_before_mth_return(const WalkParams& params, long long m, Rng& rng,
                                long long step_cap) {
  check(params);
  if (m < 1) throw std::domain_error("max_before_mth_return: m must be >= 1");
  long long state = 0, returns = 0, best = 0;
  for (long long step = 0; step < step_cap; ++step) {
    double denom = static_cast<double>(state) + params.rho;
    if (rng.uniform01() * denom < params.rho) {
      ++state;
      best = std::max(best, state);
    } else {
      --state;
      if (state == 0 && ++returns == m) return best;
    }
  }
  throw NumericError("max_before_mth_return: step cap", 0.0,
                     static_cast<double>(step_cap));
}

}  // namespace cq::walk
