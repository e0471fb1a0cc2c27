#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "cyclequeue/cycle_counts.hpp"
#include "cyclequeue/rng.hpp"

// Sequentially grown random permutation: element n+1 either opens a new
// cycle (probability theta / (theta + n)) or is inserted into a cycle of
// size i, moving it to size i+1 (probability i * c_i / (theta + n)).

namespace cq::crp {

struct CrpParams {
  double theta = 1.0;
};

// One insertion step; degree grows by exactly 1. In debug builds the
// partition constraint sum i * c_i == n is rechecked after the move.
CycleCounts crp_step(const CycleCounts& state, const CrpParams& params,
                     Rng& rng);
void crp_step_in_place(CycleCounts& state, const CrpParams& params, Rng& rng);

// Grow from the empty permutation to degree n.
CycleCounts simulate_to_degree(long long n, const CrpParams& params, Rng& rng);

// Ewens sampling formula: P[C^(n) = c] = n!/(theta)_n prod (theta/i)^{c_i}/c_i!
double log_ewens_pmf(const CycleCounts& state, const CrpParams& params);
double ewens_pmf(const CycleCounts& state, const CrpParams& params);

// E[z^{K_n}] = (theta z)_n / (theta)_n, evaluated as a product of the
// one-step factors (theta z + i)/(theta + i) so z <= 0 is fine too.
double cycles_pgf(long long n, const CrpParams& params, double z);

// Limit law of the number of k-cycles: Poisson(theta / k).
double limiting_count_pmf(long long k, const CrpParams& params, long long c);

// Occupation time of the singleton count: T_n(level) = #{m <= n: C_1^(m) = level}.
struct OccupationRecord {
  long long level = 0;
  // (n, T_n(level)/n) at each requested checkpoint
  std::vector<std::pair<long long, double>> checkpoints;
};

// The singleton count is itself a Markov chain (up theta/(theta+n), down
// c/(theta+n)), so only that marginal is simulated; the chain starts at
// degree 1 with one singleton. Checkpoints must be increasing and >= 1.
OccupationRecord occupation_trajectory(const CrpParams& params, long long level,
                                       const std::vector<long long>& checkpoints,
                                       Rng& rng);

// The same marginal chain run to degree n, returning C_1^(n); tests compare
// it against the full-state simulation.
long long simulate_singleton_count(const CrpParams& params, long long n,
                                   Rng& rng);

// Enumerates the partitions of n (as CycleCounts) in lexicographic order of
// largest part; used for exact Ewens sums.
void for_each_partition(long long n,
                        const std::function<void(const CycleCounts&)>& fn);

}  // namespace cq::crp
