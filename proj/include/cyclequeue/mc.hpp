#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cyclequeue/rng.hpp"

// Monte Carlo harness: replicate estimation with per-replicate derived RNG
// streams, batch means for single-path time averages, and fixed-significance
// goodness-of-fit tests (z at a sigma budget, chi-square and KS at p = 0.001).
// All reductions use pairwise summation over the index-ordered replicate
// values, so reported digits do not depend on thread count or schedule.

namespace cq::mc {

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample sd / sqrt(n)
  long long n = 0;
  std::string seed_provenance;  // e.g. "master=42 reps=100000"
};

enum class TestKind { z, chi_square, ks };

struct GofResult {
  TestKind kind;
  double statistic = 0.0;
  double threshold = 0.0;  // reject when statistic > threshold
  bool pass = false;
  long long dof = 0;  // chi-square only
};

// Worker cap: CYCLEQUEUE_THREADS if set (>= 1), else hardware concurrency.
int worker_count();

// Deterministic sum independent of chunking: recursive pairwise over [i, j).
double pairwise_sum(const std::vector<double>& v);

McEstimate from_values(const std::vector<double>& values,
                       std::string seed_provenance = {});

// Runs sampler(rng) for replicate indices 0..n_reps-1, each on its own
// derived stream, in parallel. Result is identical for any thread count.
McEstimate estimate(long long n_reps, std::uint64_t master_seed,
                    const std::function<double(Rng&)>& sampler);

// Vector-valued variant: one simulation pass feeding several statistics.
// Returns one estimate per component.
std::vector<McEstimate> estimate_vec(
    long long n_reps, std::uint64_t master_seed, std::size_t dim,
    const std::function<void(Rng&, std::vector<double>&)>& sampler);

// Time average of a piecewise-constant path split into equal-length batches.
// `jumps` holds (time, value) with the value held from that time to the next
// jump (first entry at the path start); mean/stderr are across batch means.
// Requires n_batches >= 10 and t_end beyond the last jump time.
McEstimate batch_means(const std::vector<std::pair<double, double>>& jumps,
                       double t_start, double t_end, int n_batches);

// Streaming form of the same computation, O(n_batches) memory.
class BatchAccumulator {
 public:
  BatchAccumulator(double t_start, double t_end, int n_batches);
  void add_segment(double t0, double t1, double value);
  McEstimate finish() const;  // requires full coverage of [t_start, t_end]

 private:
  double t_start_, t_end_, width_;
  std::vector<double> integrals_;
  double covered_ = 0.0;
};

// |mean - target| / stderr against a sigma budget. Zero stderr passes only
// when mean == target exactly.
GofResult z_test(const McEstimate& est, double target, double n_sigmas = 4.0);

// Pearson chi-square of integer samples against a pmf, tail bins merged up to
// expected count >= 5; significance is the fixed upper-tail p (default 1e-3).
GofResult chi_square_test(const std::vector<long long>& samples,
                          const std::function<double(long long)>& pmf,
                          double significance = 1e-3);

// Same statistic from pre-binned counts and cell probabilities (categories
// beyond the listed ones must have probability ~0 or be merged by caller).
GofResult chi_square_counts(const std::vector<long long>& observed,
                            const std::vector<double>& probs,
                            double significance = 1e-3);

// Kolmogorov-Smirnov against a continuous CDF, asymptotic threshold
// K_p / sqrt(n).
GofResult ks_test(std::vector<double> samples,
                  const std::function<double(double)>& cdf,
                  double significance = 1e-3);

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// Upper quantiles used for the thresholds.
double chi_square_upper_quantile(double p, long long dof);
double kolmogorov_upper_quantile(double p);

// parallel_for(n, body): body(i) for i in [0, n), split across workers.
void parallel_for(long long n, const std::function<void(long long)>& body);

}  // namespace cq::mc
