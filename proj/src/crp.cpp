#include "cyclequeue/crp.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "cyclequeue/specials.hpp"

namespace cq::crp {

namespace {

void check_params(const CrpParams& params) {
  if (!(params.theta > 0.0)) throw std::domain_error("crp: theta must be > 0");
}

}  // namespace

void crp_step_in_place(CycleCounts& state, const CrpParams& params, Rng& rng) {
  check_params(params);
  long long n = state.degree();
  double u = rng.uniform01() * (params.theta + static_cast<double>(n));
  if (u < params.theta || n == 0) {
    if (state.counts.empty()) state.counts.resize(1, 0);
    ++state.counts[0];
  } else {
    // select cycle size i with weight i * c_i
    double acc = params.theta;
    std::size_t pick = state.counts.size();
    for (std::size_t i = 0; i < state.counts.size(); ++i) {
      acc += static_cast<double>(i + 1) * static_cast<double>(state.counts[i]);
      if (u < acc) {
        pick = i;
        break;
      }
    }
    // roundoff at the very top lands on the last nonempty size
    if (pick == state.counts.size()) {
      pick = state.counts.size() - 1;
      while (state.counts[pick] == 0) --pick;
    }
    --state.counts[pick];
    if (pick + 2 > state.counts.size()) state.counts.resize(pick + 2, 0);
    ++state.counts[pick + 1];
  }
  assert(state.degree() == n + 1);
}

CycleCounts crp_step(const CycleCounts& state, const CrpParams& params,
                     Rng& rng) {
  CycleCounts next = state;
  crp_step_in_place(next, params, rng);
  next.trim();
  return next;
}

CycleCounts simulate_to_degree(long long n, const CrpParams& params, Rng& rng) {
  if (n < 0) throw std::domain_error("simulate_to_degree: n must be >= 0");
  CycleCounts state;
  for (long long m = 0; m < n; ++m) crp_step_in_place(state, params, rng);
  state.trim();
  return state;
}

double log_ewens_pmf(const CycleCounts& state, const CrpParams& params) {
  check_params(params);
  long long n = state.degree();
  double log_theta = std::log(params.theta);
  // log n! - log (theta)_n
  double lp = lfactorial(n);
  for (long long j = 0; j < n; ++j)
    lp -= std::log(params.theta + static_cast<double>(j));
  for (std::size_t i = 0; i < state.counts.size(); ++i) {
    long long ci = state.counts[i];
    if (ci == 0) continue;
    lp += static_cast<double>(ci) *
              (log_theta - std::log(static_cast<double>(i + 1))) -
          lfactorial(ci);
  }
  return lp;
}

double ewens_pmf(const CycleCounts& state, const CrpParams& params) {
  return std::exp(log_ewens_pmf(state, params));
}

double cycles_pgf(long long n, const CrpParams& params, double z) {
  check_params(params);
  if (n < 0) throw std::domain_error("cycles_pgf: n must be >= 0");
  double p = 1.0;
  for (long long i = 0; i < n; ++i)
    p *= (params.theta * z + static_cast<double>(i)) /
         (params.theta + static_cast<double>(i));
  return p;
}

double limiting_count_pmf(long long k, const CrpParams& params, long long c) {
  check_params(params);
  if (k < 1) throw std::domain_error("limiting_count_pmf: k must be >= 1");
  return poisson_pmf(params.theta / static_cast<double>(k), c);
}

OccupationRecord occupation_trajectory(const CrpParams& params, long long level,
                                       const std::vector<long long>& checkpoints,
                                       Rng& rng) {
  check_params(params);
  if (level < 0) throw std::domain_error("occupation_trajectory: level < 0");
  if (checkpoints.empty())
    throw std::domain_error("occupation_trajectory: no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 ||
        (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
      throw std::domain_error("occupation_trajectory: checkpoints must be increasing and >= 1");
  }

  OccupationRecord rec;
  rec.level = level;
  long long singletons = 1;  // degree 1: the one-element permutation
  long long occupied = (singletons == level) ? 1 : 0;
  std::size_t next_cp = 0;
  long long n_max = checkpoints.back();
  const double theta = params.theta;
  for (long long n = 1; n <= n_max; ++n) {
    while (next_cp < checkpoints.size() && checkpoints[next_cp] == n) {
      rec.checkpoints.emplace_back(
          n, static_cast<double>(occupied) / static_cast<double>(n));
      ++next_cp;
    }
    if (n == n_max) break;
    // transition of C_1 at degree n -> n+1
    double u = rng.uniform01() * (theta + static_cast<double>(n));
    if (u < theta) {
      ++singletons;
    } else if (u < theta + static_cast<double>(singletons)) {
      --singletons;
    }
    if (singletons == level) ++occupied;
  }
  return rec;
}

long long simulate_singleton_count(const CrpParams& params, long long n,
                                   Rng& rng) {
  check_params(params);
  if (n < 1) throw std::domain_error("simulate_singleton_count: n must be >= 1");
  long long singletons = 1;
  for (long long m = 1; m < n; ++m) {
    double u = rng.uniform01() * (params.theta + static_cast<double>(m));
    if (u < params.theta) {
      ++singletons;
    } else if (u < params.theta + static_cast<double>(singletons)) {
      --singletons;
    }
  }
  return singletons;
}

namespace {

void partitions_rec(long long remaining, long long max_part,
                    std::vector<long long>& counts,
                    const std::function<void(const CycleCounts&)>& fn) {
  if (remaining == 0) {
    fn(CycleCounts(counts));
    return;
  }
  for (long long part = std::min(remaining, max_part); part >= 1; --part) {
    ++counts[static_cast<std::size_t>(part - 1)];
    partitions_rec(remaining - part, part, counts, fn);
    --counts[static_cast<std::size_t>(part - 1)];
  }
}

}  // namespace

void for_each_partition(long long n,
                        const std::function<void(const CycleCounts&)>& fn) {
  if (n < 0) throw std::domain_error("for_each_partition: n must be >= 0");
  if (n == 0) {
    fn(CycleCounts{});
    return;
  }
  std::vector<long long> counts(static_cast<std::size_t>(n), 0);
  partitions_rec(n, n, counts, fn);
}

}  // namespace cq::crp
