#include "cyclequeue/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <thread>

#include "cyclequeue/specials.hpp"

namespace cq::mc {

int worker_count() {
  if (const char* env = std::getenv("CYCLEQUEUE_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(long long n, const std::function<void(long long)>& body) {
  if (n <= 0) return;
  int workers = worker_count();
  if (workers == 1 || n < 2 * workers) {
    for (long long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  long long chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    long long lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (long long i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

namespace {

double pairwise_range(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_range(v, half) + pairwise_range(v + half, n - half);
}

}  // namespace

double pairwise_sum(const std::vector<double>& v) {
  return pairwise_range(v.data(), v.size());
}

McEstimate from_values(const std::vector<double>& values,
                       std::string seed_provenance) {
  McEstimate est;
  est.n = static_cast<long long>(values.size());
  est.seed_provenance = std::move(seed_provenance);
  if (values.empty()) throw std::domain_error("from_values: empty sample");
  est.mean = pairwise_sum(values) / static_cast<double>(values.size());
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      double d = values[i] - est.mean;
      sq[i] = d * d;
    }
    double var = pairwise_sum(sq) / static_cast<double>(values.size() - 1);
    est.stderr_ = std::sqrt(var / static_cast<double>(values.size()));
  }
  return est;
}

McEstimate estimate(long long n_reps, std::uint64_t master_seed,
                    const std::function<double(Rng&)>& sampler) {
  if (n_reps <= 0) throw std::domain_error("estimate: n_reps must be > 0");
  std::vector<double> values(static_cast<std::size_t>(n_reps));
  parallel_for(n_reps, [&](long long i) {
    Rng rng = derive_stream(master_seed, static_cast<std::uint64_t>(i));
    values[static_cast<std::size_t>(i)] = sampler(rng);
  });
  return from_values(values, "master=" + std::to_string(master_seed) +
                                 " reps=" + std::to_string(n_reps));
}

std::vector<McEstimate> estimate_vec(
    long long n_reps, std::uint64_t master_seed, std::size_t dim,
    const std::function<void(Rng&, std::vector<double>&)>& sampler) {
  if (n_reps <= 0) throw std::domain_error("estimate_vec: n_reps must be > 0");
  if (dim == 0) throw std::domain_error("estimate_vec: dim must be > 0");
  std::vector<std::vector<double>> cols(dim);
  for (auto& c : cols) c.resize(static_cast<std::size_t>(n_reps));
  parallel_for(n_reps, [&](long long i) {
    Rng rng = derive_stream(master_seed, static_cast<std::uint64_t>(i));
    std::vector<double> out(dim);
    sampler(rng, out);
    for (std::size_t d = 0; d < dim; ++d)
      cols[d][static_cast<std::size_t>(i)] = out[d];
  });
  std::vector<McEstimate> result;
  result.reserve(dim);
  std::string prov = "master=" + std::to_string(master_seed) +
                     " reps=" + std::to_string(n_reps);
  for (std::size_t d = 0; d < dim; ++d)
    result.push_back(from_values(cols[d], prov));
  return result;
}

BatchAccumulator::BatchAccumulator(double t_start, double t_end, int n_batches)
    : t_start_(t_start), t_end_(t_end) {
  if (n_batches < 10)
    throw std::domain_error("batch_means: need at least 10 batches");
  if (!(t_end > t_start)) throw std::domain_error("batch_means: empty span");
  width_ = (t_end - t_start) / n_batches;
  integrals_.assign(static_cast<std::size_t>(n_batches), 0.0);
}

void BatchAccumulator::add_segment(double t0, double t1, double value) {
  t0 = std::max(t0, t_start_);
  t1 = std::min(t1, t_end_);
  if (!(t1 > t0)) return;
  covered_ += t1 - t0;
  int b0 = static_cast<int>((t0 - t_start_) / width_);
  int b1 = static_cast<int>((t1 - t_start_) / width_);
  b0 = std::clamp(b0, 0, static_cast<int>(integrals_.size()) - 1);
  b1 = std::clamp(b1, 0, static_cast<int>(integrals_.size()) - 1);
  for (int b = b0; b <= b1; ++b) {
    double lo = t_start_ + b * width_;
    double hi = lo + width_;
    double seg = std::min(t1, hi) - std::max(t0, lo);
    if (seg > 0.0) integrals_[static_cast<std::size_t>(b)] += seg * value;
  }
}

McEstimate BatchAccumulator::finish() const {
  double span = t_end_ - t_start_;
  if (covered_ < span * (1.0 - 1e-9))
    throw std::domain_error("batch_means: path does not cover the span");
  std::vector<double> means(integrals_.size());
  for (std::size_t b = 0; b < integrals_.size(); ++b)
    means[b] = integrals_[b] / width_;
  return from_values(means, "batches=" + std::to_string(integrals_.size()));
}

McEstimate batch_means(const std::vector<std::pair<double, double>>& jumps,
                       double t_start, double t_end, int n_batches) {
  if (jumps.empty()) throw std::domain_error("batch_means: empty path");
  BatchAccumulator acc(t_start, t_end, n_batches);
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    double t1 = i + 1 < jumps.size() ? jumps[i + 1].first : t_end;
    acc.add_segment(jumps[i].first, t1, jumps[i].second);
  }
  return acc.finish();
}

GofResult z_test(const McEstimate& est, double target, double n_sigmas) {
  GofResult r;
  r.kind = TestKind::z;
  r.threshold = n_sigmas;
  if (est.stderr_ == 0.0) {
    r.statistic = est.mean == target
                      ? 0.0
                      : std::numeric_limits<double>::infinity();
    r.pass = est.mean == target;
    return r;
  }
  r.statistic = std::abs(est.mean - target) / est.stderr_;
  r.pass = r.statistic <= r.threshold;
  return r;
}

double chi_square_upper_quantile(double p, long long dof) {
  if (!(p > 0.0 && p < 1.0) || dof < 1)
    throw std::domain_error("chi_square_upper_quantile: bad arguments");
  double a = static_cast<double>(dof) / 2.0;
  // gamma_q(a, x/2) is decreasing in x; bracket then Brent.
  double lo = 1e-8, hi = static_cast<double>(dof);
  while (gamma_q(a, hi / 2.0) > p) hi *= 2.0;
  RootSpec spec;
  spec.lo = lo;
  spec.hi = hi;
  spec.tol = 1e-10;
  return find_root([&](double x) { return gamma_q(a, x / 2.0) - p; }, spec);
}

double kolmogorov_upper_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("kolmogorov_upper_quantile: bad p");
  auto upper = [](double x) {
    double s = 0.0;
    for (int j = 1; j <= 100; ++j) {
      double term = 2.0 * std::exp(-2.0 * j * j * x * x);
      if (j % 2 == 0) term = -term;
      s += term;
      if (std::abs(term) < 1e-18) break;
    }
    return s;
  };
  RootSpec spec;
  spec.lo = 0.2;
  spec.hi = 4.0;
  spec.tol = 1e-10;
  return find_root([&](double x) { return upper(x) - p; }, spec);
}

GofResult chi_square_counts(const std::vector<long long>& observed,
                            const std::vector<double>& probs,
                            double significance) {
  if (observed.size() != probs.size() || observed.empty())
    throw std::domain_error("chi_square_counts: size mismatch");
  long long n = 0;
  for (long long o : observed) n += o;
  if (n <= 0) throw std::domain_error("chi_square_counts: no samples");

  // Merge adjacent cells until every expected count is >= 5.
  std::vector<double> exp_cnt;
  std::vector<double> obs_cnt;
  double pending_e = 0.0, pending_o = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    pending_e += probs[i] * static_cast<double>(n);
    pending_o += static_cast<double>(observed[i]);
    if (pending_e >= 5.0) {
      exp_cnt.push_back(pending_e);
      obs_cnt.push_back(pending_o);
      pending_e = pending_o = 0.0;
    }
  }
  if (pending_e > 0.0 || pending_o > 0.0) {
    if (exp_cnt.empty()) {
      exp_cnt.push_back(pending_e);
      obs_cnt.push_back(pending_o);
    } else {
      exp_cnt.back() += pending_e;
      obs_cnt.back() += pending_o;
    }
  }
  GofResult r;
  r.kind = TestKind::chi_square;
  if (exp_cnt.size() < 2)
    throw std::domain_error("chi_square_counts: fewer than 2 usable cells");
  double stat = 0.0;
  for (std::size_t i = 0; i < exp_cnt.size(); ++i) {
    double d = obs_cnt[i] - exp_cnt[i];
    stat += d * d / exp_cnt[i];
  }
  r.statistic = stat;
  r.dof = static_cast<long long>(exp_cnt.size()) - 1;
  r.threshold = chi_square_upper_quantile(significance, r.dof);
  r.pass = r.statistic <= r.threshold;
  return r;
}

GofResult chi_square_test(const std::vector<long long>& samples,
                          const std::function<double(long long)>& pmf,
                          double significance) {
  if (samples.empty()) throw std::domain_error("chi_square_test: no samples");
  long long lo = samples[0], hi = samples[0];
  for (long long s : samples) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  lo = std::min(lo, 0LL);
  std::vector<long long> observed(static_cast<std::size_t>(hi - lo + 1), 0);
  for (long long s : samples) ++observed[static_cast<std::size_t>(s - lo)];
  std::vector<double> probs(observed.size());
  double covered = 0.0;
  for (long long v = lo; v <= hi; ++v) {
    probs[static_cast<std::size_t>(v - lo)] = pmf(v);
    covered += probs[static_cast<std::size_t>(v - lo)];
  }
  // Residual mass beyond the observed range goes to the last cell.
  if (covered < 1.0) probs.back() += 1.0 - covered;
  return chi_square_counts(observed, probs, significance);
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::domain_error("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double dn = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double F = cdf(samples[i]);
    double hi = (static_cast<double>(i) + 1.0) / n - F;
    double lo = F - static_cast<double>(i) / n;
    dn = std::max({dn, hi, lo});
  }
  return dn;
}

GofResult ks_test(std::vector<double> samples,
                  const std::function<double(double)>& cdf,
                  double significance) {
  GofResult r;
  r.kind = TestKind::ks;
  double n = static_cast<double>(samples.size());
  r.statistic = ks_statistic(std::move(samples), cdf);
  r.threshold = kolmogorov_upper_quantile(significance) / std::sqrt(n);
  r.pass = r.statistic <= r.threshold;
  return r;
}

}  // namespace cq::mc
