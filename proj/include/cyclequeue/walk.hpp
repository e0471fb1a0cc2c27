#pragma once

#include <utility>
#include <vector>

#include "cyclequeue/rng.hpp"

// Birth-death jump chain of the singleton count: from state c move up with
// p_c = rho/(c + rho) and down with q_c = c/(c + rho). Positive recurrent
// with stationary law alpha_c = e^-rho (rho + c) rho^{c-1} / (2 c!).

namespace cq::walk {

struct WalkParams {
  double rho = 1.0;
};

struct StepProbs {
  double up = 0.0;
  double down = 0.0;
};

StepProbs step_probs(const WalkParams& params, long long c);

double stationary_pmf(const WalkParams& params, long long c);

// Mean excursion length above c started from the first entry into c+1:
// E[kappa_c] = 1 + (2 c!/rho^c) sum_{j>c} rho^j/j!; kappa_0 has mean 2e^rho-1.
double mean_excursion_length(const WalkParams& params, long long c);

// Variance of the excursion length at level 0 (regenerative cycle of the
// Harris chain): 4e^rho(2rho - e^rho + 1) + 8e^rho sum_r pi_r^-1 (sum_{j>r} pi_j)^2
// with pi the Poisson(rho) weights.
double var_excursion_length(const WalkParams& params);

// P[hit u before ell | start s], ell <= s <= u, via the scale sums
// (sum_{r=ell}^{s-1} 1/pi_r) / (sum_{r=ell}^{u-1} 1/pi_r).
double ruin_probability(const WalkParams& params, long long ell, long long s,
                        long long u);

// P[H_c >= h+1] = 1 / sum_{r=0}^{h} (c+1)_r / rho^r for the height H_c of an
// excursion above c.
double height_tail(const WalkParams& params, long long c, long long h);

struct HeightMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Moments of H_0 summed from the height tail.
HeightMoments height_moments(const WalkParams& params);

// Integer index I_m near log m / log log m locating the running maximum
// after m returns to 0:
// floor[(log m - 0.5 log log m - 0.5 log 2pi)/(log log m - 1 - log rho) + 1/2].
// Requires log log m > 1 + log rho.
long long park_index(const WalkParams& params, long long m);

struct WalkExcursion {
  long long length = 0;   // passage time from c+1 down to c (odd, = 2*upmoves+1)
  long long height = 0;   // max state minus c
  long long upmoves = 0;  // up-steps taken above c
};

// Simulate one excursion above c: the walk has just stepped into c+1 and
// runs until it hits c. Throws after step_cap steps.
WalkExcursion simulate_excursion(const WalkParams& params, long long c, Rng& rng,
                                 long long step_cap = 1000000000LL);

// One trajectory from `start`; true if it reaches `hi` before `lo`.
bool simulate_reaches_before(const WalkParams& params, long long start,
                             long long hi, long long lo, Rng& rng,
                             long long step_cap = 1000000000LL);

// Run n_steps from state0 and return per-batch occupation fractions of
// `level` (each batch of equal step count); used with mc::from_values.
std::vector<double> occupation_batches(const WalkParams& params, long long state0,
                                       long long n_steps, int n_batches,
                                       long long level, Rng& rng);

// Running maximum observed up to the m-th return to 0, walk started at 0.
long long max_before_mth_return(const WalkParams& params, long long m, Rng& rng,
                                long long step_cap = 4000000000LL);

}  // namespace cq::walk
