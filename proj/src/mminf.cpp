#include "cyclequeue/mminf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cyclequeue/specials.hpp"

namespace cq::mminf {

namespace {

void check_params(const QueueParams& p) {
  if (!(p.theta > 0.0) || !(p.mu > 0.0))
    throw std::domain_error("mminf: theta and mu must be > 0");
}

// sum_{d>=1} d^weight * prod_{l=1..d} rho/(c+l). All terms positive; the
// product peaks near d = rho - c and then decays factorially.
double ratio_series(double rho, long long c, int weight) {
  double term = 1.0;
  double sum = 0.0;
  for (long long d = 1; d <= 2000000; ++d) {
    term *= rho / static_cast<double>(c + d);
    const double w =
        weight == 0 ? 1.0 : std::pow(static_cast<double>(d), weight);
    sum += w * term;
    if (term > 1e290)
      throw NumericError("mminf series: rho too large", sum, term);
    if (static_cast<double>(d) > rho - static_cast<double>(c) &&
        w * term < 1e-17 * sum)
      return sum;
  }
  throw NumericError("mminf series: no convergence", sum, term);
}

}  // namespace

double transient_pmf(const QueueParams& params, double t, long long c,
                     TimeConvention convention) {
  check_params(params);
  if (t < 0.0) throw std::domain_error("transient_pmf: t < 0");
  if (c < 0) return 0.0;
  const double decay = convention == TimeConvention::per_task_rate
                           ? -std::expm1(-params.mu * t)
                           : -std::expm1(-t / params.mu);
  const double mean = params.rho() * decay;
  if (mean == 0.0) return c == 0 ? 1.0 : 0.0;
  return poisson_pmf(mean, c);
}

double mean_duration(const QueueParams& params, long long c) {
  check_params(params);
  if (c < 0) throw std::domain_error("mean_duration: c < 0");
  return ratio_series(params.rho(), c, 0) / params.theta;
}

double mean_area(const QueueParams& params, long long c) {
  check_params(params);
  if (c < 0) throw std::domain_error("mean_area: c < 0");
  return ratio_series(params.rho(), c, 1) / params.theta;
}

double mean_arrivals(const QueueParams& params, long long c) {
  check_params(params);
  if (c < 0) throw std::domain_error("mean_arrivals: c < 0");
  return ratio_series(params.rho(), c, 0);
}

double i_integral(long long c, double alpha, double beta) {
  if (c < 0) throw std::domain_error("i_integral: c < 0");
  if (!(alpha > 0.0))
    throw std::domain_error("i_integral: alpha must be > 0");
  const QuadratureSpec tight{1e-12, 1e-11, 48};
  double quad;
  if (alpha >= 1.0) {
    quad = integrate(
        [&](double u) {
          return std::pow(u, static_cast<double>(c)) *
                 std::pow(1.0 - u, alpha - 1.0) * std::exp(-beta * u);
        },
        0.0, 1.0, tight);
  } else {
    // w = (1-u)^alpha straightens the endpoint singularity exactly
    quad = integrate(
               [&](double w) {
                 const double u = 1.0 - std::pow(w, 1.0 / alpha);
                 return std::pow(u, static_cast<double>(c)) *
                        std::exp(-beta * u);
               },
               0.0, 1.0, tight) /
           alpha;
  }
  const double kummer =
      std::exp(-beta + lfactorial(c) + std::lgamma(alpha) -
               std::lgamma(alpha + static_cast<double>(c) + 1.0)) *
      kummer_m(alpha, alpha + static_cast<double>(c) + 1.0, beta);
  const double scale = std::max(std::fabs(quad), std::fabs(kummer));
  if (std::fabs(quad - kummer) > 1e-8 * scale)
    throw NumericError("i_integral: quadrature and Kummer forms disagree",
                       quad, std::fabs(quad - kummer));
  return quad;
}

double duration_lt(const QueueParams& params, long long c, double z) {
  check_params(params);
  if (c < 0) throw std::domain_error("duration_lt: c < 0");
  if (z < 0.0) throw std::domain_error("duration_lt: z < 0");
  if (z == 0.0) return 1.0;
  const double alpha = z / params.mu;
  const double rho = params.rho();
  return i_integral(c + 1, alpha, rho) / i_integral(c, alpha, rho);
}

double joint_lt(const QueueParams& params, long long c, double x, double y,
                double z) {
  check_params(params);
  if (c < 0) throw std::domain_error("joint_lt: c < 0");
  if (x == 0.0 && y == 0.0 && z == 0.0) return 1.0;
  const double zmu = z + params.mu;
  const double a = (x + params.theta) / zmu;
  const double b = params.theta * params.mu * std::exp(-y) / (zmu * zmu);
  const double alpha = a - b;
  if (alpha <= 0.0)
    throw std::domain_error("joint_lt: outside the validity region a > b");
  return (params.mu / zmu) * i_integral(c + 1, alpha, b) /
         i_integral(c, alpha, b);
}

double duration_second_moment(const QueueParams& params) {
  check_params(params);
  const double rho = params.rho();
  // S1 = sum_j rho^j / (j j!) so that sum_j pi_j / j = e^{-rho} S1
  double term = 1.0, s1 = 0.0;
  for (long long j = 1; j <= 100000; ++j) {
    term *= rho / static_cast<double>(j);
    const double add = term / static_cast<double>(j);
    s1 += add;
    if (static_cast<double>(j) > rho && add < 1e-17 * s1) break;
  }
  const double series = 2.0 * std::exp(rho) * s1 / (params.theta * params.mu);
  const double integral =
      2.0 * std::exp(rho) *
      integrate(
          [](double s) { return s < 1e-12 ? 1.0 : std::expm1(s) / s; }, 0.0,
          rho, QuadratureSpec{1e-13, 1e-12, 48}) /
      (params.theta * params.mu);
  if (std::fabs(series - integral) > 1e-9 * std::fabs(series))
    throw NumericError("duration_second_moment: series and integral forms "
                       "disagree",
                       series, std::fabs(series - integral));
  return series;
}

double duration_third_moment(const QueueParams& params) {
  check_params(params);
  const double rho = params.rho();
  double term = 1.0, s1 = 0.0, s2 = 0.0;
  for (long long j = 1; j <= 100000; ++j) {
    term *= rho / static_cast<double>(j);
    s1 += term / static_cast<double>(j);
    s2 += term / static_cast<double>(j * j);
    if (static_cast<double>(j) > rho && term < 1e-17 * (s1 + s2)) break;
  }
  return 6.0 * std::exp(rho) * (s1 * s1 + s2) /
         (params.theta * params.mu * params.mu);
}

double leading_root(const QueueParams& params, long long c) {
  check_params(params);
  if (c < 0) throw std::domain_error("leading_root: c < 0");
  const double rho = params.rho();
  const double pole = static_cast<double>(c) + 1.0;
  auto f = [&](double z) { return kummer_m(-z, pole - z, rho); };
  double z_prev = 0.0;
  double f_prev = 1.0;  // M(0, c+1, rho) = 1
  for (double z = 0.05; z < pole - 0.025; z += 0.05) {
    const double fz = f(z);
    if (fz == 0.0) return z;
    if (f_prev * fz < 0.0)
      return find_root(f, RootSpec{z_prev, z, 1e-13, 200});
    z_prev = z;
    f_prev = fz;
  }
  throw NumericError("leading_root: no sign change below the pole", 0.0,
                     pole);
}

double first_passage_mean_sum(const QueueParams& params, long long c) {
  check_params(params);
  if (c < 0) throw std::domain_error("first_passage_mean_sum: c < 0");
  double sum = 0.0;
  for (long long j = 0; j <= c; ++j) sum += mean_duration(params, j);
  return sum;
}

QueueExcursion simulate_queue_excursion(const QueueParams& params, long long c,
                                        Rng& rng, long long step_cap) {
  check_params(params);
  if (c < 0) throw std::domain_error("simulate_queue_excursion: c < 0");
  QueueExcursion ex;
  long long state = c + 1;
  ex.height = 1;
  for (long long step = 0;; ++step) {
    if (step >= step_cap)
      throw std::runtime_error("simulate_queue_excursion: step cap exceeded");
    const double rate =
        params.theta + params.mu * static_cast<double>(state);
    const double hold = rng.exponential(rate);
    ex.duration += hold;
    ex.area += static_cast<double>(state - c) * hold;
    if (rng.bernoulli(params.theta / rate)) {
      ++state;
      ++ex.arrivals;
      ex.height = std::max(ex.height, state - c);
    } else {
      --state;
      if (state == c) break;
    }
  }
  return ex;
}

}  // namespace cq::mminf
