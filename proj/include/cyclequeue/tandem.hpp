#pragma once

#include <iosfwd>
#include <vector>

#include "cyclequeue/cycle_counts.hpp"
#include "cyclequeue/rng.hpp"

// Continuous-time cycle growth as a tandem of infinite-server stations:
// station i holds the cycles of size i, new singletons arrive at rate theta,
// and each size-i cycle is promoted to size i+1 at rate i. Event-driven exact
// simulation plus the closed transient/steady-state laws of the counts, the
// Pascal law of the degree, and the limit law of the largest cycle.

namespace cq::tandem {

struct TandemParams {
  double theta = 1.0;
  long long k = 10;  // tracking depth: sizes 1..k are followed individually
};

// open: a size-k cycle's promotion removes it from the system.
// full: every cycle is tracked to any size (per-cycle records internally).
enum class TandemMode { open, full };

struct EventRecord {
  double time = 0.0;
  CycleCounts state;
  // Cumulative counters, immune to cycles leaving the tracked window in open
  // mode: cycles_created counts arrivals ever, degree counts elements ever.
  long long cycles_created = 0;
  long long degree = 0;
};

// events[0] is the initial state at time 0; times strictly increase and the
// degree column advances by exactly 1 per event.
struct EventPath {
  std::vector<EventRecord> events;
  double t_end = 0.0;
};

// Gillespie simulation until t_end. Total jump rate is theta + sum of the
// sizes in play (tracked sizes only in open mode). Throws std::runtime_error
// past event_cap. Full mode rebuilds the multiplicity state per event, so it
// costs O(cycles) per record; use simulate_max_cycle for large-t statistics.
EventPath simulate_tandem(const TandemParams& params, double t_end,
                          const CycleCounts& initial, Rng& rng,
                          TandemMode mode = TandemMode::open,
                          long long event_cap = 20000000);

// Last record with time <= t. Pre: path nonempty, events[0].time <= t.
const EventRecord& state_at(const EventPath& path, double t);

// Counts drawn from the stationary product law: C_i ~ Poisson(theta/i).
CycleCounts sample_steady_state(const TandemParams& params, Rng& rng);

// Largest cycle size at t_end starting empty. Per-cycle sizes plus a flat
// element -> cycle owner array make every event O(1): picking a uniform
// element is the same as picking a cycle with probability size/degree.
long long simulate_max_cycle(double theta, double t_end, Rng& rng);

// E[C_i(t)] from an empty start: theta (1 - e^{-t})^i / i. Pre: 1 <= i <= k.
double transient_marginal_mean(const TandemParams& params, long long i,
                               double t);

// Stationary probability of (c_1, ..., c_k): product of Poisson(theta/i)
// masses. Pre: state.size() == k.
double steady_state_pmf(const TandemParams& params,
                        const std::vector<long long>& state);

// P[degree grows by j over an interval of length dt | current degree n]:
// negative binomial with shape theta + n and success probability 1 - e^{-dt}.
double pascal_increment_pmf(const TandemParams& params, long long n, double dt,
                            long long j);

struct PascalisationResult {
  double residual;  // |sum_n P[N(t)=n] (theta z)_n/(theta)_n - e^{theta t(z-1)}|
  double bound;     // certified: geometric NB tail + summation roundoff
};

// Mixing the degree-n cycle-count pgf over the Pascal law of N(t) collapses
// to e^{theta t (z-1)}. Sums n_terms+1 terms; contract: residual <= bound.
PascalisationResult pascalisation_check(const TandemParams& params, double t,
                                        double z, long long n_terms);

// lim_t P[e^{-t} M(t) <= x] = exp(-theta E1(x)). x <= 0: domain error.
double max_cycle_limit_cdf(double theta, double x);

// Limit intensity of scaled cycle sizes above x: theta E1(x).
double prm_mean_measure_tail(double theta, double x);

// Finite-t intensity above x: theta sum_{j > floor(x e^t)} (1-e^{-t})^j / j.
// Also exp(-value) is the exact CDF of M(t) at floor(x e^t) from empty start.
double prm_prelimit_tail(double theta, double t, double x);

struct PrmPoint {
  double location;  // e^{-t} * size
  long long mass;   // multiplicity of that size
};

// Scaled point configuration of a state: one point per occupied size.
std::vector<PrmPoint> prm_points(const CycleCounts& state, double t);

// Per-step probability scale of a truncated-state change in the discrete
// chain: r = theta + sum_{i <= k} i c_i. Sizes beyond k never touch c_1..c_k.
double sojourn_rate(const TandemParams& params, const CycleCounts& state);

struct SojournCheck {
  double ks_distance;  // empirical log(m/nu) vs Exp(rate)
  double rate;
  long long n_samples;
};

// Starts the discrete chain at degree nu in the given truncated state and
// records the degree m at the first change of (c_1, ..., c_k); log(m/nu)
// converges to Exp(r). Steps Bernoulli(r/(theta+n)) up to degree 100 nu, then
// inverts the exact Gamma-ratio survival for the remaining tail, so the
// sample law is exact at every nu. Throws std::runtime_error when the state
// cannot coexist with degree nu (tracked weight over nu, or a leftover that
// no arrangement of cycles larger than k can carry).
SojournCheck time_change_sojourn_check(const TandemParams& params,
                                       const CycleCounts& state, long long nu,
                                       long long n_samples, Rng& rng);

// Columns: time, c1..ck, K, N. Counts beyond size k are folded into N only.
void write_event_path_csv(std::ostream& os, const EventPath& path,
                          long long k);

}  // namespace cq::tandem
