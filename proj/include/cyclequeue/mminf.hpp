#pragma once

#include "cyclequeue/rng.hpp"

// One M/M/infinity station viewed through its excursions above a level c:
// arrivals Poisson(theta), each task served at rate mu, so the station is a
// birth-death chain with up-rate theta and down-rate mu * state. Closed-form
// excursion functionals (duration, area, arrival count, Laplace transforms,
// busy-period moments, decay root) next to an exact event simulator.

namespace cq::mminf {

struct QueueParams {
  double theta = 1.0;  // arrival rate
  double mu = 1.0;     // per-task service rate
  double rho() const { return theta / mu; }
};

// The transient occupancy is Poisson with a mean that relaxes to rho; the two
// published exponent conventions disagree when mu != 1, so both are exposed.
// per_task_rate (e^{-mu t}) is the one the event simulator obeys.
enum class TimeConvention { per_task_rate, mean_time_scale };

// P[X(t) = c | X(0) = 0]: Poisson pmf with mean rho (1 - e^{-mu t}) under
// per_task_rate, rho (1 - e^{-t/mu}) under mean_time_scale.
double transient_pmf(const QueueParams& params, double t, long long c,
                     TimeConvention convention = TimeConvention::per_task_rate);

// E[D_c]: mean first-passage time from c+1 down to c. Evaluated as the
// all-positive ratio series (1/theta) sum_d prod_{l=1..d} rho/(c+l).
double mean_duration(const QueueParams& params, long long c);

// E[A_c]: mean of the integral of (X - c) over the excursion.
double mean_area(const QueueParams& params, long long c);

// E[Delta_c]: mean number of arrivals during the excursion (= theta E[D_c]).
double mean_arrivals(const QueueParams& params, long long c);

// I_c(alpha, beta) = int_0^1 u^c (1-u)^{alpha-1} e^{-beta u} du. Computed by
// adaptive quadrature (singularity-removing substitution when alpha < 1) and
// cross-checked against e^{-beta} Gamma(c+1) Gamma(alpha) / Gamma(c+alpha+1)
// * M(alpha, alpha+c+1, beta) to 1e-8 relative; the quadrature value is
// returned. alpha <= 0 is a domain error.
double i_integral(long long c, double alpha, double beta);

// E[e^{-z D_c}] = I_{c+1}(z/mu, rho) / I_c(z/mu, rho). The z/mu argument is
// the convention whose slope at 0 reproduces -E[D_c]; z = 0 returns 1.
double duration_lt(const QueueParams& params, long long c, double z);

// E[e^{-x D_c - y Delta_c - z A_c}] =
//   mu/(z+mu) * I_{c+1}(a-b, b) / I_c(a-b, b),
// a = (x+theta)/(z+mu), b = theta mu e^{-y} / (z+mu)^2. The origin is the
// removable a = b point and returns 1 exactly; elsewhere a <= b is a domain
// error (outside the transform's validity region).
double joint_lt(const QueueParams& params, long long c, double x, double y,
                double z);

// E[D_0^2] = (2 e^{2 rho}/(theta mu)) sum_{j>=1} pi_j / j, asserted to agree
// with the integral form (2 e^rho/(theta mu)) int_0^rho (e^s - 1)/s ds.
double duration_second_moment(const QueueParams& params);

// E[D_0^3] = (6 e^rho/(theta mu^2)) [e^{2 rho} (sum pi_j/j)^2
//                                    + e^rho sum pi_j/j^2].
double duration_third_moment(const QueueParams& params);

// Smallest positive root of z -> M(-z, c+1-z, rho): the decay rate of
// P[D_c > t] in units of mu. Sign scan in steps of 0.05 below the pole at
// z = c+1, then bracketed refinement; throws NumericError when no sign
// change is found.
double leading_root(const QueueParams& params, long long c);

// sum_{j=0..c} E[D_j]: mean time to first empty the stations 0..c. Grows
// like log(c)/mu, with an O(1) offset that keeps the ratio well above 1 at
// any desk-scale c.
double first_passage_mean_sum(const QueueParams& params, long long c);

struct QueueExcursion {
  double duration = 0.0;   // D_c
  long long height = 0;    // H_c: max of X - c over the excursion
  double area = 0.0;       // A_c: integral of X - c
  long long arrivals = 0;  // Delta_c; the jump count is 2*arrivals + 1
};

// Exact event simulation from state c+1 until the first return to c. Holding
// times are Exp(theta + mu*state); area accumulates (state - c) * holding
// time between jumps. Throws std::runtime_error past step_cap jumps.
QueueExcursion simulate_queue_excursion(const QueueParams& params, long long c,
                                        Rng& rng,
                                        long long step_cap = 1000000000);

}  // namespace cq::mminf
