#pragma once

#include "cyclequeue/mminf.hpp"
#include "cyclequeue/rng.hpp"
#include "cyclequeue/specials.hpp"

// M/G/infinity station whose service time is the largest of k unit-rate
// exponentials, equivalently the time a task takes to climb stages 1..k at
// per-stage rates 1, 2, ..., k. Offered load rho = theta * h_k with h_k the
// k-th harmonic number. Busy-period analytics (Laplace transforms, moments,
// exponential tail constants) sit next to an exact event simulator and a
// geometric-sum sampler for the stationary-excess duration.

namespace cq::mginf {

struct MgParams {
  double theta = 1.0;  // arrival rate
  long long k = 1;     // number of service stages
  double rho() const { return theta * harmonic(k); }
};

// Tail constants of P[D_0 > t] ~ alpha e^{-beta t}: beta is the unique root
// of L(-beta) = 0 in (0, 1), alpha = -1 / (theta int e^{beta t} t pi0'(t) dt).
struct TailAsymptotics {
  double beta = 0.0;
  double alpha = 0.0;
};

// P[sigma <= t] = (1 - e^{-t})^k.
double service_cdf(long long k, double t);

// Stationary residual (integrated-tail) law of the service time:
// P[sigma* <= t] = (1/h_k) int_0^t P[sigma > x] dx, via the exact binomial
// antiderivative.
double residual_cdf(long long k, double t);

// P[system empty at t | empty at 0] = exp(-rho P[sigma* <= t]); decreases
// from 1 to pi0 = e^{-rho}.
double pi0_of_t(const MgParams& params, double t);

// L(z) = 1 + int_0^infty e^{-zt} pi0'(t) dt, holomorphic on z > -1 (the
// integrand is dominated by theta k e^{-(1+z)t}); z <= -1 is a domain error.
double l_function(const MgParams& params, double z);

// E[e^{-z D_0}] = 1 + z/theta - z/(theta L(z)) for the busy period D_0.
double takacs_duration_lt(const MgParams& params, double z);

// E[D_0] = (e^rho - 1)/theta.
double busy_mean(const MgParams& params);

// E[D_0^2] = (2/(theta pi0^2)) int_0^infty (pi0(t) - pi0) dt, certified
// exponential-tail truncation.
double busy_second_moment(const MgParams& params);

// beta by bracketed bisection of L(-beta) on a verified sign change in
// (0, 1), alpha by quadrature at that beta. Throws NumericError when no
// bracket is found.
TailAsymptotics tail_asymptotics(const MgParams& params);

// E[e^{-z D_0*}] = (1/L(z) - 1) / (e^rho - 1) for the stationary-excess
// busy period; cross-checked against (1 - E[e^{-z D_0}]) / (z E[D_0]) to
// 1e-8 relative (NumericError on disagreement).
double dstar_lt(const MgParams& params, double z);

// One draw of D_0* as a Geometric(pi0) number (support >= 1) of i.i.d.
// summands with density -pi0'(t)/(1 - pi0), each obtained by monotone
// inversion of the closed-form residual cdf.
double sample_dstar_geometric(const MgParams& params, Rng& rng);

// Exact event-driven busy period: Poisson(theta) arrivals, independent
// stage-sum service draws, departure heap; runs from an arrival into an
// empty system until the system next empties. arrivals excludes the
// initiator. Throws std::runtime_error past event_cap events.
mminf::QueueExcursion simulate_busy_period(const MgParams& params, Rng& rng,
                                           long long event_cap = 1000000000);

}  // namespace cq::mginf
