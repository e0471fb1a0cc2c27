#pragma once

#include <iosfwd>
#include <vector>

#include "cyclequeue/rng.hpp"

// Tagged-item observations in a tandem of K infinite-server phases: Poisson
// (theta) arrivals walk phases 1..K with Exp(mu_i) sojourns, and L_i is the
// occupancy of phase i seen by one item the instant it enters that phase.
// In steady state each L_i is Poisson(rho_i), rho_i = theta/mu_i; the pair
// dependence comes from the overlap of the tagged item's passage with the
// residents it meets.

namespace cq::tagged {

struct TaggedParams {
  double theta = 1.0;
  std::vector<double> rates;  // mu_1..mu_K, all positive
};

struct TaggedObservation {
  std::vector<long long> occupancies;  // L_1..L_K for one tagged item
};

struct PhiPsi {
  double phi = 0.0;  // P[tagged sits in phase k at t after entering phase j]
  double psi = 0.0;  // P[tagged has entered phase k by t after entering j]
};

// Closed forms for the permutation rates mu_i = i via x = 1 - e^{-t}:
// psi is the (k-j)-th order-statistic CDF of k-1 uniforms at x, and
// phi = C(k-1, j-1) x^{k-j} (1-x)^j. Requires 1 <= j < k <= K and rates
// exactly 1..K (general rates are a domain error here).
PhiPsi phi_psi(const TaggedParams& params, long long j, long long k,
               double t);

// Joint p.g.f. of (L_j, L_k) at (x, y) in [0,1]^2:
// exp{rho_j(x-1) + rho_k(y-1)} int exp{rho_j(x-1)(y-1) phi_jk} d psi_jk,
// reduced to a Beta-weighted integral over the x-substituted variable.
// Same rate restriction as phi_psi.
double joint_pgf(const TaggedParams& params, long long j, long long k,
                 double x, double y);

// cov(L_j, L_k) = theta C(k-1,j) C(k-1,j-1) (2k-2j-1)! (2j-1)! / (2k-1)!
// for rates 1..K.
double covariance(const TaggedParams& params, long long j, long long k);

// corr(L_j, L_k) for rates mu_i = i: sqrt(jk) times the covariance at
// theta = 1. Free of theta.
double correlation(long long j, long long k);

// General-rate correlation through the polynomial interpolating the points
// (mu_i^2, mu_i) for i = j..k, evaluated at 0 by the barycentric formula:
// corr = L(0) / (2 sqrt(mu_j mu_k)). Duplicate nodes are a domain error.
double lagrange_correlation(const std::vector<double>& rates, long long j,
                            long long k);

// Steady-start tandem simulation: phase i begins with Poisson(rho_i)
// occupants whose residual sojourns are fresh Exp(mu_i) (memorylessness
// makes this exact), runs for `warmup`, then records the next n_tagged
// arrivals. Each record holds the occupancy of every phase immediately
// before the tagged item enters it.
std::vector<TaggedObservation> simulate_tagged(const TaggedParams& params,
                                               long long n_tagged,
                                               double warmup, Rng& rng);

// CSV with header tag_id,L1,..,LK.
void write_tagged_csv(std::ostream& os,
                      const std::vector<TaggedObservation>& observations);

}  // namespace cq::tagged
