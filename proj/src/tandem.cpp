#include "cyclequeue/tandem.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "cyclequeue/mc.hpp"
#include "cyclequeue/specials.hpp"

namespace cq::tandem {

namespace {

void check_params(const TandemParams& p) {
  if (!(p.theta > 0.0)) throw std::domain_error("tandem: theta must be > 0");
  if (p.k < 1) throw std::domain_error("tandem: k must be >= 1");
}

CycleCounts counts_from_sizes(const std::vector<long long>& sizes) {
  long long mx = 0;
  for (long long s : sizes) mx = std::max(mx, s);
  std::vector<long long> c(static_cast<std::size_t>(mx), 0);
  for (long long s : sizes) ++c[static_cast<std::size_t>(s - 1)];
  return CycleCounts(std::move(c));
}

}  // namespace

EventPath simulate_tandem(const TandemParams& params, double t_end,
                          const CycleCounts& initial, Rng& rng,
                          TandemMode mode, long long event_cap) {
  check_params(params);
  if (!(t_end > 0.0)) throw std::domain_error("simulate_tandem: t_end <= 0");

  EventPath path;
  path.t_end = t_end;
  long long created = initial.cycles();
  long long degree = initial.degree();
  double time = 0.0;

  if (mode == TandemMode::open) {
    const std::size_t k = static_cast<std::size_t>(params.k);
    std::vector<long long> c(k, 0);
    long long weight = 0;  // sum of tracked sizes = sum i*c_i, i <= k
    for (std::size_t i = 0; i < initial.counts.size() && i < k; ++i) {
      c[i] = initial.counts[i];
      weight += static_cast<long long>(i + 1) * c[i];
    }
    path.events.push_back({0.0, CycleCounts(c), created, degree});
    for (;;) {
      const double rate = params.theta + static_cast<double>(weight);
      time += rng.exponential(rate);
      if (time > t_end) break;
      const double u = rng.uniform01() * rate;
      if (u < params.theta) {
        ++c[0];
        ++weight;
        ++created;
      } else {
        double acc = params.theta;
        std::size_t pick = k;  // roundoff fallback: largest occupied size
        for (std::size_t i = 0; i < k; ++i) {
          acc += static_cast<double>(i + 1) * static_cast<double>(c[i]);
          if (u < acc && c[i] > 0) {
            pick = i;
            break;
          }
        }
        if (pick == k) {
          for (std::size_t i = k; i-- > 0;)
            if (c[i] > 0) {
              pick = i;
              break;
            }
        }
        --c[pick];
        weight -= static_cast<long long>(pick + 1);
        if (pick + 1 < k) {
          ++c[pick + 1];
          weight += static_cast<long long>(pick + 2);
        }
      }
      ++degree;
      path.events.push_back({time, CycleCounts(c), created, degree});
      if (static_cast<long long>(path.events.size()) > event_cap)
        throw std::runtime_error("simulate_tandem: event cap exceeded");
    }
    return path;
  }

  // full mode: per-cycle sizes plus element -> cycle owners, O(1) per event
  std::vector<long long> sizes;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < initial.counts.size(); ++i)
    for (long long r = 0; r < initial.counts[i]; ++r) {
      sizes.push_back(static_cast<long long>(i + 1));
      for (std::size_t e = 0; e <= i; ++e) owner.push_back(sizes.size() - 1);
    }
  path.events.push_back({0.0, initial, created, degree});
  for (;;) {
    const double rate = params.theta + static_cast<double>(owner.size());
    time += rng.exponential(rate);
    if (time > t_end) break;
    const double u = rng.uniform01() * rate;
    if (u < params.theta) {
      sizes.push_back(1);
      owner.push_back(sizes.size() - 1);
      ++created;
    } else {
      const std::size_t cyc = owner[rng.uniform_index(owner.size())];
      ++sizes[cyc];
      owner.push_back(cyc);
    }
    ++degree;
    path.events.push_back({time, counts_from_sizes(sizes), created, degree});
    if (static_cast<long long>(path.events.size()) > event_cap)
      throw std::runtime_error("simulate_tandem: event cap exceeded");
  }
  return path;
}

const EventRecord& state_at(const EventPath& path, double t) {
  if (path.events.empty() || t < path.events.front().time)
    throw std::domain_error("state_at: t before the first record");
  auto it = std::upper_bound(
      path.events.begin(), path.events.end(), t,
      [](double lhs, const EventRecord& r) { return lhs < r.time; });
  return *std::prev(it);
}

CycleCounts sample_steady_state(const TandemParams& params, Rng& rng) {
  check_params(params);
  std::vector<long long> c(static_cast<std::size_t>(params.k));
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = rng.poisson(params.theta / static_cast<double>(i + 1));
  CycleCounts out(std::move(c));
  out.trim();
  return out;
}

long long simulate_max_cycle(double theta, double t_end, Rng& rng) {
  if (!(theta > 0.0)) throw std::domain_error("simulate_max_cycle: theta");
  if (!(t_end > 0.0)) throw std::domain_error("simulate_max_cycle: t_end");
  std::vector<long long> sizes;
  std::vector<std::size_t> owner;
  long long max_size = 0;
  double time = 0.0;
  for (;;) {
    const double rate = theta + static_cast<double>(owner.size());
    time += rng.exponential(rate);
    if (time > t_end) break;
    if (rng.uniform01() * rate < theta) {
      sizes.push_back(1);
      owner.push_back(sizes.size() - 1);
      max_size = std::max(max_size, 1LL);
    } else {
      const std::size_t cyc = owner[rng.uniform_index(owner.size())];
      ++sizes[cyc];
      owner.push_back(cyc);
      max_size = std::max(max_size, sizes[cyc]);
    }
  }
  return max_size;
}

double transient_marginal_mean(const TandemParams& params, long long i,
                               double t) {
  check_params(params);
  if (i < 1 || i > params.k)
    throw std::domain_error("transient_marginal_mean: need 1 <= i <= k");
  if (t < 0.0) throw std::domain_error("transient_marginal_mean: t < 0");
  const double y = -std::expm1(-t);
  return params.theta * std::pow(y, static_cast<double>(i)) /
         static_cast<double>(i);
}

double steady_state_pmf(const TandemParams& params,
                        const std::vector<long long>& state) {
  check_params(params);
  if (state.size() != static_cast<std::size_t>(params.k))
    throw std::domain_error("steady_state_pmf: state length must equal k");
  double lp = -params.theta * harmonic(params.k);
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] < 0) throw std::domain_error("steady_state_pmf: count < 0");
    lp += static_cast<double>(state[i]) *
              std::log(params.theta / static_cast<double>(i + 1)) -
          lfactorial(state[i]);
  }
  return std::exp(lp);
}

double pascal_increment_pmf(const TandemParams& params, long long n, double dt,
                            long long j) {
  check_params(params);
  if (n < 0) throw std::domain_error("pascal_increment_pmf: n < 0");
  if (!(dt > 0.0)) throw std::domain_error("pascal_increment_pmf: dt <= 0");
  if (j < 0) return 0.0;
  const double r = params.theta + static_cast<double>(n);
  const double p = -std::expm1(-dt);
  if (p == 0.0) return j == 0 ? 1.0 : 0.0;
  const double lp = std::lgamma(static_cast<double>(j) + r) - std::lgamma(r) -
                    lfactorial(j) +
                    static_cast<double>(j) * std::log(p) - r * dt;
  return std::exp(lp);
}

PascalisationResult pascalisation_check(const TandemParams& params, double t,
                                        double z, long long n_terms) {
  check_params(params);
  if (!(t > 0.0)) throw std::domain_error("pascalisation_check: t <= 0");
  if (z < 0.0 || z > 1.0)
    throw std::domain_error("pascalisation_check: z outside [0,1]");
  if (n_terms < 1) throw std::domain_error("pascalisation_check: n_terms < 1");
  const double th = params.theta;
  const double p = -std::expm1(-t);
  double pmf = std::exp(-th * t);  // P[N(t)=0] = (1-p)^theta
  double ratio = 1.0;              // (theta z)_n / (theta)_n
  double sum = pmf;
  for (long long n = 0; n < n_terms; ++n) {
    pmf *= p * (static_cast<double>(n) + th) / static_cast<double>(n + 1);
    ratio *= (th * z + static_cast<double>(n)) /
             (th + static_cast<double>(n));
    sum += pmf * ratio;
  }
  const double target = std::exp(th * t * (z - 1.0));
  // tail ratio pmf(n+1)/pmf(n) = p (n+theta)/(n+1), monotone in n; its sup
  // over the tail is at n_terms+1 when theta >= 1 and approaches p otherwise
  const double q =
      p * std::max(1.0, (static_cast<double>(n_terms) + 1.0 + th) /
                            (static_cast<double>(n_terms) + 2.0));
  if (q >= 1.0)
    throw std::domain_error("pascalisation_check: n_terms too small to "
                            "certify the tail");
  const double pmf_next =
      pmf * p * (static_cast<double>(n_terms) + th) /
      static_cast<double>(n_terms + 1);
  const double roundoff = 16.0 * DBL_EPSILON * static_cast<double>(n_terms + 1);
  return {std::fabs(sum - target), pmf_next / (1.0 - q) + roundoff};
}

double max_cycle_limit_cdf(double theta, double x) {
  return std::exp(-prm_mean_measure_tail(theta, x));
}

double prm_mean_measure_tail(double theta, double x) {
  if (!(theta > 0.0)) throw std::domain_error("prm tail: theta must be > 0");
  if (!(x > 0.0)) throw std::domain_error("prm tail: x must be > 0");
  return theta * exp_integral_e1(x);
}

double prm_prelimit_tail(double theta, double t, double x) {
  if (!(theta > 0.0)) throw std::domain_error("prm tail: theta must be > 0");
  if (!(t > 0.0)) throw std::domain_error("prm tail: t must be > 0");
  if (!(x > 0.0)) throw std::domain_error("prm tail: x must be > 0");
  const double scaled = x * std::exp(t);
  if (scaled >= 4e18)
    throw std::domain_error("prm tail: x e^t exceeds the integer window");
  const long long m = static_cast<long long>(scaled);
  const double y = -std::expm1(-t);
  const double ly = std::log(y);
  double yj = std::exp(static_cast<double>(m + 1) * ly);
  double sum = 0.0;
  long long j = m + 1;
  const long long cap = j + 400000000;
  while (yj > 0.0) {
    const double term = yj / static_cast<double>(j);
    sum += term;
    if (term < 1e-18 * sum) break;
    yj *= y;
    ++j;
    if (j > cap) {
      const double rest = yj / (static_cast<double>(j) * (1.0 - y));
      throw NumericError("prm_prelimit_tail: series too slow",
                                   theta * sum, theta * rest);
    }
  }
  return theta * sum;
}

std::vector<PrmPoint> prm_points(const CycleCounts& state, double t) {
  if (t < 0.0) throw std::domain_error("prm_points: t < 0");
  const double scale = std::exp(-t);
  std::vector<PrmPoint> pts;
  for (std::size_t i = 0; i < state.counts.size(); ++i)
    if (state.counts[i] > 0)
      pts.push_back({static_cast<double>(i + 1) * scale, state.counts[i]});
  return pts;
}

double sojourn_rate(const TandemParams& params, const CycleCounts& state) {
  check_params(params);
  double r = params.theta;
  const std::size_t k = static_cast<std::size_t>(params.k);
  for (std::size_t i = 0; i < state.counts.size() && i < k; ++i)
    r += static_cast<double>(i + 1) * static_cast<double>(state.counts[i]);
  return r;
}

SojournCheck time_change_sojourn_check(const TandemParams& params,
                                       const CycleCounts& state, long long nu,
                                       long long n_samples, Rng& rng) {
  check_params(params);
  if (nu < 1) throw std::domain_error("sojourn check: nu must be >= 1");
  if (n_samples < 1) throw std::domain_error("sojourn check: n_samples < 1");
  long long weight = 0;
  const std::size_t k = static_cast<std::size_t>(params.k);
  for (std::size_t i = 0; i < state.counts.size() && i < k; ++i)
    weight += static_cast<long long>(i + 1) * state.counts[i];
  const long long leftover = nu - weight;
  if (leftover < 0 || (leftover > 0 && leftover <= params.k))
    throw std::runtime_error(
        "sojourn check: truncated state not realizable at degree nu");
  const double r = params.theta + static_cast<double>(weight);
  const double theta = params.theta;
  const long long cap = 100 * nu;
  // conditional survival beyond the stepped range, as a log of Gamma ratios
  const double base = std::lgamma(theta + static_cast<double>(cap) - r) -
                      std::lgamma(theta + static_cast<double>(cap));
  auto log_surv = [&](double m) {
    return std::lgamma(theta + m - r) - std::lgamma(theta + m) - base;
  };

  std::vector<double> values(static_cast<std::size_t>(n_samples));
  const std::uint64_t master = rng.next_u64();
  mc::parallel_for(n_samples, [&](long long idx) {
    Rng stream = derive_stream(master, static_cast<std::uint64_t>(idx));
    double m = -1.0;
    for (long long n = nu; n < cap; ++n) {
      if (stream.bernoulli(r / (theta + static_cast<double>(n)))) {
        m = static_cast<double>(n + 1);
        break;
      }
    }
    if (m < 0.0) {
      // exact inversion of the residual law given survival to degree cap
      const double lu = std::log(stream.uniform01_pos());
      double hi = 2.0 * static_cast<double>(cap);
      while (log_surv(hi) > lu && hi < 1e300) hi *= 2.0;
      double lo = static_cast<double>(cap);
      while (hi - lo > 0.5) {
        const double mid = std::floor((lo + hi) / 2.0);
        if (mid <= lo || mid >= hi) break;
        if (log_surv(mid) <= lu)
          hi = mid;
        else
          lo = mid;
      }
      m = hi;
    }
    values[static_cast<std::size_t>(idx)] =
        std::log(m / static_cast<double>(nu));
  });

  const double ks = mc::ks_statistic(
      std::move(values), [&](double s) { return -std::expm1(-r * s); });
  return {ks, r, n_samples};
}

void write_event_path_csv(std::ostream& os, const EventPath& path,
                          long long k) {
  if (k < 1) throw std::domain_error("write_event_path_csv: k < 1");
  os << "time";
  for (long long i = 1; i <= k; ++i) os << ",c" << i;
  os << ",K,N\n";
  char buf[40];
  for (const EventRecord& ev : path.events) {
    std::snprintf(buf, sizeof buf, "%.12g", ev.time);
    os << buf;
    for (long long i = 1; i <= k; ++i) os << ',' << ev.state.count_of_size(i);
    os << ',' << ev.cycles_created << ',' << ev.degree << '\n';
  }
}

}  // namespace cq::tandem
