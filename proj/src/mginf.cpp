#include "cyclequeue/mginf.hpp"

#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace cq::mginf {

namespace {

void check_params(const MgParams& p) {
  if (!(p.theta > 0.0) || p.k < 1)
    throw std::domain_error("mginf: need theta > 0 and k >= 1");
}

// P[sigma > t], kept as a separate helper because it is the integrand of
// everything downstream.
double service_tail(long long k, double t) {
  return -std::expm1(static_cast<double>(k) * std::log1p(-std::exp(-t)));
}

// int_0^t P[sigma > x] dx = sum_{j=1..k} C(k,j) (-1)^{j+1} (1-e^{-jt})/j.
double integrated_tail(long long k, double t) {
  double sum = 0.0;
  for (long long j = 1; j <= k; ++j) {
    const double sign = j % 2 == 1 ? 1.0 : -1.0;
    sum += sign * std::exp(log_binomial(k, j)) *
           -std::expm1(-static_cast<double>(j) * t) / static_cast<double>(j);
  }
  return sum;
}

double pi0_limit(const MgParams& p) { return std::exp(-p.rho()); }

// pi0'(t) = -theta P[sigma > t] pi0(t).
double pi0_derivative(const MgParams& p, double t) {
  return -p.theta * service_tail(p.k, t) * pi0_of_t(p, t);
}

double sample_service(long long k, Rng& rng) {
  double s = 0.0;
  for (long long i = 1; i <= k; ++i)
    s += rng.exponential(static_cast<double>(i));
  return s;
}

// Inverse of residual_cdf by bisection: the tail bound
// 1 - F*(t) <= (k/h_k) e^{-t} supplies a finite upper bracket.
double invert_residual(const MgParams& p, double target) {
  const double hk = harmonic(p.k);
  double hi =
      std::max(1.0, -std::log((1.0 - target) * hk / static_cast<double>(p.k)));
  while (residual_cdf(p.k, hi) < target) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-13 * (1.0 + hi)) {
    const double mid = 0.5 * (lo + hi);
    (residual_cdf(p.k, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double service_cdf(long long k, double t) {
  if (k < 1) throw std::domain_error("service_cdf: k < 1");
  if (t < 0.0) throw std::domain_error("service_cdf: t < 0");
  return std::exp(static_cast<double>(k) * std::log1p(-std::exp(-t)));
}

double residual_cdf(long long k, double t) {
  if (k < 1) throw std::domain_error("residual_cdf: k < 1");
  if (t < 0.0) throw std::domain_error("residual_cdf: t < 0");
  return integrated_tail(k, t) / harmonic(k);
}

double pi0_of_t(const MgParams& params, double t) {
  check_params(params);
  if (t < 0.0) throw std::domain_error("pi0_of_t: t < 0");
  return std::exp(-params.theta * integrated_tail(params.k, t));
}

double l_function(const MgParams& params, double z) {
  check_params(params);
  if (!(z > -1.0)) throw std::domain_error("l_function: need z > -1");
  const double coef = params.theta * static_cast<double>(params.k);
  return 1.0 + integrate_to_inf(
                   [&](double t) {
                     return std::exp(-z * t) * pi0_derivative(params, t);
                   },
                   0.0, coef, 1.0 + z);
}

double takacs_duration_lt(const MgParams& params, double z) {
  check_params(params);
  if (z < 0.0) throw std::domain_error("takacs_duration_lt: z < 0");
  if (z == 0.0) return 1.0;
  return 1.0 + z / params.theta - z / (params.theta * l_function(params, z));
}

double busy_mean(const MgParams& params) {
  check_params(params);
  return std::expm1(params.rho()) / params.theta;
}

double busy_second_moment(const MgParams& params) {
  check_params(params);
  const double pi0 = pi0_limit(params);
  // pi0(t) - pi0 <= pi0 * rho (k/h_k) e^{theta k} e^{-t} for all t >= 0,
  // from 1 - F*(t) <= (k/h_k) e^{-t} and e^x - 1 <= x e^x
  const double tk = params.theta * static_cast<double>(params.k);
  const double coef = pi0 * tk * std::exp(tk);
  const double integral = integrate_to_inf(
      [&](double t) { return pi0_of_t(params, t) - pi0; }, 0.0, coef, 1.0);
  return 2.0 * integral / (params.theta * pi0 * pi0);
}

TailAsymptotics tail_asymptotics(const MgParams& params) {
  check_params(params);
  auto g = [&](double beta) { return l_function(params, -beta); };
  double lo = 0.0, g_lo = pi0_limit(params);  // L(0) = e^{-rho} > 0
  double beta = -1.0;
  for (double b = 0.05; b < 0.995; b += 0.05) {
    const double gb = g(b);
    if (gb == 0.0) {
      beta = b;
      break;
    }
    if (g_lo * gb < 0.0) {
      beta = find_root(g, RootSpec{lo, b, 1e-13, 200});
      break;
    }
    lo = b;
    g_lo = gb;
  }
  if (beta < 0.0)
    throw NumericError("tail_asymptotics: L(-beta) has no sign change in "
                       "(0, 1)",
                       0.0, 1.0);
  // |e^{beta t} t pi0'(t)| <= theta k t e^{-(1-beta)t} and
  // t e^{-lambda t} <= (2/(lambda e)) e^{-lambda t / 2}
  const double lambda = 1.0 - beta;
  const double coef = params.theta * static_cast<double>(params.k) * 2.0 /
                      (lambda * std::exp(1.0));
  const double integral = integrate_to_inf(
      [&](double t) {
        return std::exp(beta * t) * t * pi0_derivative(params, t);
      },
      0.0, coef, lambda / 2.0);
  return TailAsymptotics{beta, -1.0 / (params.theta * integral)};
}

double dstar_lt(const MgParams& params, double z) {
  check_params(params);
  if (!(z > 0.0)) throw std::domain_error("dstar_lt: need z > 0");
  const double direct =
      (1.0 / l_function(params, z) - 1.0) / std::expm1(params.rho());
  // integrated-tail relation: E[e^{-z eta*}] = (1 - E[e^{-z eta}])/(z E[eta])
  const double alt = (1.0 - takacs_duration_lt(params, z)) /
                     (z * busy_mean(params));
  if (std::fabs(direct - alt) > 1e-8 * std::max(std::fabs(direct), 1e-300))
    throw NumericError("dstar_lt: geometric-sum and integrated-tail routes "
                       "disagree",
                       direct, std::fabs(direct - alt));
  return direct;
}

double sample_dstar_geometric(const MgParams& params, Rng& rng) {
  check_params(params);
  const double pi0 = pi0_limit(params);
  double sum = 0.0;
  do {
    // one summand: cdf (1 - pi0(t)) / (1 - pi0), inverted through the
    // residual cdf of the service time
    const double u = rng.uniform01_pos();
    const double target =
        -std::log1p(-u * -std::expm1(-params.rho())) / params.rho();
    sum += invert_residual(params, target);
  } while (!rng.bernoulli(pi0));
  return sum;
}

mminf::QueueExcursion simulate_busy_period(const MgParams& params, Rng& rng,
                                           long long event_cap) {
  check_params(params);
  mminf::QueueExcursion ex;
  std::priority_queue<double, std::vector<double>, std::greater<double>>
      departures;
  departures.push(sample_service(params.k, rng));
  double t_now = 0.0;
  double next_arrival = rng.exponential(params.theta);
  long long occupancy = 1;
  ex.height = 1;
  for (long long events = 0;; ++events) {
    if (events >= event_cap)
      throw std::runtime_error("simulate_busy_period: event cap exceeded");
    const double next_departure = departures.top();
    if (next_arrival < next_departure) {
      ex.area += static_cast<double>(occupancy) * (next_arrival - t_now);
      t_now = next_arrival;
      ++occupancy;
      ++ex.arrivals;
      ex.height = std::max(ex.height, occupancy);
      departures.push(t_now + sample_service(params.k, rng));
      next_arrival = t_now + rng.exponential(params.theta);
    } else {
      ex.area += static_cast<double>(occupancy) * (next_departure - t_now);
      t_now = next_departure;
      departures.pop();
      if (--occupancy == 0) break;
    }
  }
  ex.duration = t_now;
  return ex;
}

}  // namespace cq::mginf
