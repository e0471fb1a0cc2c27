#include "cyclequeue/tagged.hpp"

#include <cmath>
#include <cstddef>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <utility>

#include "cyclequeue/specials.hpp"

namespace cq::tagged {

namespace {

void check_params(const TaggedParams& p) {
  if (!(p.theta > 0.0)) throw std::domain_error("tagged: theta must be > 0");
  if (p.rates.empty()) throw std::domain_error("tagged: rates must be nonempty");
  for (double r : p.rates)
    if (!(r > 0.0)) throw std::domain_error("tagged: rates must be positive");
}

void check_pair(const TaggedParams& p, long long j, long long k) {
  if (j < 1 || j >= k || k > static_cast<long long>(p.rates.size()))
    throw std::domain_error("tagged: need 1 <= j < k <= K");
}

void require_permutation_rates(const TaggedParams& p) {
  for (std::size_t i = 0; i < p.rates.size(); ++i)
    if (p.rates[i] != static_cast<double>(i + 1))
      throw std::domain_error(
          "tagged: closed forms need rates exactly 1..K; use "
          "lagrange_correlation or the simulator for general rates");
}

double binom(long long n, long long r) {
  return std::exp(log_binomial(n, r));
}

// density of the x-substituted passage time: (k-j)-th order statistic of
// k-1 uniforms, a Beta(k-j, j) in u
double psi_density(long long j, long long k, double u) {
  return std::exp(lfactorial(k - 1) - lfactorial(k - j - 1) -
                  lfactorial(j - 1)) *
         std::pow(u, static_cast<double>(k - j - 1)) *
         std::pow(1.0 - u, static_cast<double>(j - 1));
}

double phi_of_u(long long j, long long k, double u) {
  return binom(k - 1, j - 1) * std::pow(u, static_cast<double>(k - j)) *
         std::pow(1.0 - u, static_cast<double>(j));
}

}  // namespace

PhiPsi phi_psi(const TaggedParams& params, long long j, long long k,
               double t) {
  check_params(params);
  check_pair(params, j, k);
  require_permutation_rates(params);
  if (t < 0.0) throw std::domain_error("phi_psi: t < 0");
  const double x = -std::expm1(-t);
  PhiPsi out;
  out.phi = phi_of_u(j, k, x);
  for (long long i = k - j; i <= k - 1; ++i)
    out.psi += binom(k - 1, i) * std::pow(x, static_cast<double>(i)) *
               std::pow(1.0 - x, static_cast<double>(k - 1 - i));
  return out;
}

double joint_pgf(const TaggedParams& params, long long j, long long k,
                 double x, double y) {
  check_params(params);
  check_pair(params, j, k);
  require_permutation_rates(params);
  if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
    throw std::domain_error("joint_pgf: arguments must lie in [0,1]");
  const double rho_j = params.theta / static_cast<double>(j);
  const double rho_k = params.theta / static_cast<double>(k);
  const double front = std::exp(rho_j * (x - 1.0) + rho_k * (y - 1.0));
  const double coupling = rho_j * (x - 1.0) * (y - 1.0);
  // tight tolerances: finite-difference consumers divide by h^2
  const double integral = integrate(
      [&](double u) {
        return std::exp(coupling * phi_of_u(j, k, u)) * psi_density(j, k, u);
      },
      0.0, 1.0, QuadratureSpec{1e-13, 1e-12, 48});
  return front * integral;
}

double covariance(const TaggedParams& params, long long j, long long k) {
  check_params(params);
  check_pair(params, j, k);
  require_permutation_rates(params);
  return params.theta *
         std::exp(log_binomial(k - 1, j) + log_binomial(k - 1, j - 1) +
                  lfactorial(2 * (k - j) - 1) + lfactorial(2 * j - 1) -
                  lfactorial(2 * k - 1));
}

double correlation(long long j, long long k) {
  if (j < 1 || j >= k) throw std::domain_error("correlation: need 1 <= j < k");
  TaggedParams p{1.0, {}};
  p.rates.resize(static_cast<std::size_t>(k));
  for (long long i = 0; i < k; ++i)
    p.rates[static_cast<std::size_t>(i)] = static_cast<double>(i + 1);
  return std::sqrt(static_cast<double>(j) * static_cast<double>(k)) *
         covariance(p, j, k);
}

double lagrange_correlation(const std::vector<double>& rates, long long j,
                            long long k) {
  if (j < 1 || j >= k || k > static_cast<long long>(rates.size()))
    throw std::domain_error("lagrange_correlation: need 1 <= j < k <= K");
  for (double r : rates)
    if (!(r > 0.0))
      throw std::domain_error("lagrange_correlation: rates must be positive");
  const std::size_t lo = static_cast<std::size_t>(j - 1);
  const std::size_t hi = static_cast<std::size_t>(k - 1);
  const std::size_t n = hi - lo + 1;
  std::vector<double> node(n), value(n);
  for (std::size_t i = 0; i < n; ++i) {
    value[i] = rates[lo + i];
    node[i] = value[i] * value[i];
  }
  std::vector<double> weight(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t m = 0; m < n; ++m) {
      if (m == i) continue;
      const double d = node[i] - node[m];
      if (d == 0.0)
        throw std::domain_error("lagrange_correlation: duplicate nodes");
      weight[i] /= d;
    }
  // barycentric evaluation at 0; nodes are strictly positive so no node hit
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weight[i] / (0.0 - node[i]);
    num += w * value[i];
    den += w;
  }
  return (num / den) / (2.0 * std::sqrt(rates[lo] * rates[hi]));
}

std::vector<TaggedObservation> simulate_tagged(const TaggedParams& params,
                                               long long n_tagged,
                                               double warmup, Rng& rng) {
  check_params(params);
  if (n_tagged < 0) throw std::domain_error("simulate_tagged: n_tagged < 0");
  if (warmup < 0.0) throw std::domain_error("simulate_tagged: warmup < 0");
  const std::size_t K = params.rates.size();

  struct Item {
    std::size_t phase;     // 0-based current phase
    long long tag = -1;    // index into the output, -1 for untagged
  };
  std::vector<Item> items;
  std::vector<long long> occupancy(K, 0);
  // completion calendar: one outstanding event per in-flight item
  using Entry = std::pair<double, std::size_t>;  // (time, item index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> agenda;

  std::vector<TaggedObservation> out(
      static_cast<std::size_t>(n_tagged));
  long long created = 0, pending = 0;

  auto enter_phase = [&](std::size_t item_id, std::size_t phase, double now) {
    Item& it = items[item_id];
    it.phase = phase;
    if (it.tag >= 0)
      out[static_cast<std::size_t>(it.tag)].occupancies.push_back(
          occupancy[phase]);
    ++occupancy[phase];
    agenda.emplace(now + rng.exponential(params.rates[phase]), item_id);
  };

  // exact stationary start: Poisson(rho_i) residents, memoryless residuals
  for (std::size_t i = 0; i < K; ++i) {
    const long long n0 = rng.poisson(params.theta / params.rates[i]);
    for (long long m = 0; m < n0; ++m) {
      items.push_back(Item{i, -1});
      occupancy[i] += 1;
      agenda.emplace(rng.exponential(params.rates[i]), items.size() - 1);
    }
  }

  double next_arrival = rng.exponential(params.theta);
  for (;;) {
    const bool arrival_next =
        agenda.empty() || next_arrival < agenda.top().first;
    if (arrival_next) {
      const double now = next_arrival;
      next_arrival = now + rng.exponential(params.theta);
      items.push_back(Item{0, -1});
      const std::size_t id = items.size() - 1;
      if (now >= warmup && created < n_tagged) {
        items[id].tag = created++;
        out[static_cast<std::size_t>(items[id].tag)].occupancies.reserve(K);
        ++pending;
      }
      enter_phase(id, 0, now);
    } else {
      const auto [now, id] = agenda.top();
      agenda.pop();
      Item& it = items[id];
      --occupancy[it.phase];
      if (it.phase + 1 < K) {
        enter_phase(id, it.phase + 1, now);
      } else if (it.tag >= 0 && --pending == 0 && created == n_tagged) {
        break;
      }
    }
    if (n_tagged == 0 && next_arrival >= warmup) break;
  }
  return out;
}

void write_tagged_csv(std::ostream& os,
                      const std::vector<TaggedObservation>& observations) {
  std::size_t K = observations.empty() ? 0 : observations[0].occupancies.size();
  os << "tag_id";
  for (std::size_t i = 1; i <= K; ++i) os << ",L" << i;
  os << "\n";
  for (std::size_t r = 0; r < observations.size(); ++r) {
    os << r;
    for (long long v : observations[r].occupancies) os << ',' << v;
    os << "\n";
  }
}

}  // namespace cq::tagged
