#include "cyclequeue/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cyclequeue/crp.hpp"
#include "cyclequeue/mc.hpp"
#include "cyclequeue/mginf.hpp"
#include "cyclequeue/mminf.hpp"
#include "cyclequeue/rng.hpp"
#include "cyclequeue/tagged.hpp"
#include "cyclequeue/tandem.hpp"
#include "cyclequeue/walk.hpp"

namespace cq::cli {

namespace {

const std::set<std::string> kCommands = {"crp",  "walk",   "tandem", "mminf",
                                         "busy", "tagged", "verify"};

// Keys accepted in a --config JSON object; matches the flag set.
const std::set<std::string> kConfigKeys = {
    "theta", "mu",          "rho",      "k",      "c",     "t_end",
    "n_reps", "seed",       "checkpoints", "quantity", "output"};

std::string valid_keys_note() {
  return "valid keys: theta mu rho k c t_end n_reps seed checkpoints "
         "quantity output";
}

double positive_param(const ExperimentConfig& config, const char* key,
                      double fallback) {
  const double v = config.get(key, fallback);
  if (!(v > 0.0))
    throw std::domain_error(std::string("parameter '") + key +
                            "' must be positive");
  return v;
}

long long index_param(const ExperimentConfig& config, const char* key,
                      long long fallback, long long lo) {
  const double v = config.get(key, static_cast<double>(fallback));
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9 || r < static_cast<double>(lo))
    throw std::domain_error(std::string("parameter '") + key +
                            "' must be an integer >= " + std::to_string(lo));
  return static_cast<long long>(r);
}

long long rep_count(const ExperimentConfig& config) {
  return index_param(config, "n_reps", 100000, 2);
}

report::ReportRow analytic_row(std::string quantity, double analytic,
                               std::string ref) {
  return {std::move(quantity), analytic, std::nullopt, std::nullopt,
          std::move(ref),      std::nullopt};
}

report::ReportRow mc_row(std::string quantity, double analytic,
                         const mc::McEstimate& est, std::string ref) {
  const auto gof = mc::z_test(est, analytic);
  return {std::move(quantity), analytic, est.mean, est.stderr_,
          std::move(ref),      gof.pass};
}

// One row per quantity: full row when an estimate is present, analytic-only
// otherwise. Every builder funnels through here.
void add_row(std::vector<report::ReportRow>& out, std::string quantity,
             double analytic, std::string ref,
             const std::optional<mc::McEstimate>& est) {
  if (est)
    out.push_back(mc_row(std::move(quantity), analytic, *est, std::move(ref)));
  else
    out.push_back(analytic_row(std::move(quantity), analytic, std::move(ref)));
}

std::vector<report::ReportRow> rows_crp(const ExperimentConfig& config) {
  const double theta = positive_param(config, "theta", 1.0);
  const long long degree = index_param(config, "k", 100, 1);
  const long long n = rep_count(config);
  const crp::CrpParams cp{theta};
  std::vector<report::ReportRow> out;

  double total = 0.0;
  crp::for_each_partition(8, [&](const CycleCounts& state) {
    total += crp::ewens_pmf(state, cp);
  });
  out.push_back({"ewens-normalization-n8", total, std::nullopt, std::nullopt,
                 "ewens-sampling-formula", std::abs(total - 1.0) < 1e-10});

  double mean_cycles = 0.0;
  for (long long i = 1; i <= degree; ++i)
    mean_cycles += theta / (theta + static_cast<double>(i - 1));
  std::optional<mc::McEstimate> est;
  if (config.seed) {
    est = mc::estimate(n, splitmix64_at(*config.seed, 1), [&](Rng& rng) {
      return static_cast<double>(crp::simulate_to_degree(degree, cp, rng).cycles());
    });
  }
  add_row(out, "mean-cycle-count", mean_cycles, "logarithmic-cycle-growth",
          est);
  return out;
}

std::vector<report::ReportRow> rows_walk(const ExperimentConfig& config) {
  const double theta = positive_param(config, "theta", 1.0);
  const double mu = positive_param(config, "mu", 1.0);
  const double rho = positive_param(config, "rho", theta / mu);
  const long long n = rep_count(config);
  const walk::WalkParams wp{rho};
  const std::string& want = config.quantity;
  const auto wanted = [&](const char* group) {
    return want.empty() || want == group;
  };
  std::vector<report::ReportRow> out;

  if (wanted("height-moments")) {
    const auto hm = walk::height_moments(wp);
    std::optional<mc::McEstimate> e_mean, e_var;
    if (config.seed) {
      const auto ests = mc::estimate_vec(
          n, splitmix64_at(*config.seed, 0), 2,
          [&](Rng& rng, std::vector<double>& sample) {
            const auto ex = walk::simulate_excursion(wp, 0, rng);
            const double h = static_cast<double>(ex.height);
            sample[0] = h;
            sample[1] = (h - hm.mean) * (h - hm.mean);
          });
      e_mean = ests[0];
      e_var = ests[1];
    }
    add_row(out, "height-mean", hm.mean, "harris-excursion-height", e_mean);
    add_row(out, "height-variance", hm.variance, "harris-excursion-height",
            e_var);
  }

  if (wanted("excursion-moments")) {
    const double len_mean = walk::mean_excursion_length(wp, 0);
    const double up_mean = (len_mean - 1.0) / 2.0;
    const double up_var = walk::var_excursion_length(wp) / 4.0;
    std::optional<mc::McEstimate> e_len, e_up, e_var;
    if (config.seed) {
      const auto ests = mc::estimate_vec(
          n, splitmix64_at(*config.seed, 1), 3,
          [&](Rng& rng, std::vector<double>& sample) {
            const auto ex = walk::simulate_excursion(wp, 0, rng);
            const double u = static_cast<double>(ex.upmoves);
            sample[0] = static_cast<double>(ex.length);
            sample[1] = u;
            sample[2] = (u - up_mean) * (u - up_mean);
          });
      e_len = ests[0];
      e_up = ests[1];
      e_var = ests[2];
    }
    add_row(out, "excursion-length-mean", len_mean, "birth-death-first-return",
            e_len);
    add_row(out, "upmove-mean", up_mean, "birth-death-first-return", e_up);
    add_row(out, "upmove-variance", up_var, "birth-death-first-return", e_var);
  }

  if (wanted("occupation")) {
    const double pi0 = walk::stationary_pmf(wp, 0);
    std::optional<mc::McEstimate> est;
    if (config.seed) {
      Rng rng = derive_stream(*config.seed, 2);
      const long long steps = std::max<long long>(20 * n, 400000);
      const auto batches = walk::occupation_batches(wp, 0, steps, 20, 0, rng);
      est = mc::from_values(batches);
    }
    add_row(out, "occupation-zero", pi0, "stationary-occupation", est);
  }

  if (wanted("ruin")) {
    const double p = walk::ruin_probability(wp, 0, 1, 3);
    std::optional<mc::McEstimate> est;
    if (config.seed) {
      est = mc::estimate(n, splitmix64_at(*config.seed, 3), [&](Rng& rng) {
        return walk::simulate_reaches_before(wp, 1, 3, 0, rng) ? 1.0 : 0.0;
      });
    }
    add_row(out, "ruin-hit3-before0-from1", p, "gamblers-ruin", est);
  }

  return out;
}

std::vector<report::ReportRow> rows_tandem(const ExperimentConfig& config) {
  const double theta = positive_param(config, "theta", 1.0);
  const long long k = index_param(config, "k", 10, 1);
  const long long n = rep_count(config);
  std::vector<double> times = config.checkpoints;
  if (times.empty()) times.push_back(positive_param(config, "t_end", 1.0));
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!(times[j] > 0.0) || (j > 0 && times[j] <= times[j - 1]))
      throw std::domain_error("checkpoints must be positive and increasing");
  }
  const tandem::TandemParams tp{theta, k};
  const std::size_t m = times.size();

  std::vector<std::optional<mc::McEstimate>> ests(2 * m);
  if (config.seed) {
    const auto v = mc::estimate_vec(
        n, splitmix64_at(*config.seed, 0), 2 * m,
        [&](Rng& rng, std::vector<double>& sample) {
          const auto path =
              tandem::simulate_tandem(tp, times.back(), CycleCounts{}, rng);
          for (std::size_t j = 0; j < m; ++j) {
            const auto& rec = tandem::state_at(path, times[j]);
            sample[2 * j] = static_cast<double>(rec.state.count_of_size(1));
            sample[2 * j + 1] = static_cast<double>(rec.cycles_created);
          }
        });
    for (std::size_t j = 0; j < 2 * m; ++j) ests[j] = v[j];
  }

  std::vector<report::ReportRow> out;
  for (std::size_t j = 0; j < m; ++j) {
    const std::string suffix = "-t" + report::format_number(times[j]);
    add_row(out, "c1-mean" + suffix,
            tandem::transient_marginal_mean(tp, 1, times[j]),
            "transient-poisson-marginals", ests[2 * j]);
    add_row(out, "cycles-created-mean" + suffix, theta * times[j],
            "poisson-counting-process", ests[2 * j + 1]);
  }
  return out;
}

std::vector<report::ReportRow> rows_mminf(const ExperimentConfig& config) {
  const double theta = positive_param(config, "theta", 1.0);
  const double mu = positive_param(config, "mu", 1.0);
  const long long c = index_param(config, "c", 0, 0);
  const long long n = rep_count(config);
  const mminf::QueueParams qp{theta, mu};

  const double d_mean = mminf::mean_duration(qp, c);
  const double a_mean = mminf::mean_area(qp, c);
  const double arr_mean = mminf::mean_arrivals(qp, c);
  const double d_var =
      c == 0 ? mminf::duration_second_moment(qp) - d_mean * d_mean : 0.0;

  std::vector<std::optional<mc::McEstimate>> ests(4);
  if (config.seed) {
    const std::size_t dim = c == 0 ? 4 : 3;
    const auto v = mc::estimate_vec(
        n, splitmix64_at(*config.seed, 0), dim,
        [&](Rng& rng, std::vector<double>& sample) {
          const auto ex = mminf::simulate_queue_excursion(qp, c, rng);
          sample[0] = ex.duration;
          sample[1] = ex.area;
          sample[2] = static_cast<double>(ex.arrivals);
          if (c == 0)
            sample[3] = (ex.duration - d_mean) * (ex.duration - d_mean);
        });
    for (std::size_t j = 0; j < dim; ++j) ests[j] = v[j];
  }

  std::vector<report::ReportRow> out;
  add_row(out, "duration-mean", d_mean, "birth-death-busy-period", ests[0]);
  add_row(out, "area-mean", a_mean, "excursion-area", ests[1]);
  add_row(out, "arrivals-mean", arr_mean, "wald-identity", ests[2]);
  if (c == 0)
    add_row(out, "duration-variance", d_var, "busy-period-variance", ests[3]);
  out.push_back(analytic_row("leading-root", mminf::leading_root(qp, c),
                             "kummer-leading-zero"));
  return out;
}

std::vector<report::ReportRow> rows_busy(const ExperimentConfig& config) {
  const double theta = positive_param(config, "theta", 1.0);
  const long long k = index_param(config, "k", 1, 1);
  const long long n = rep_count(config);
  const mginf::MgParams gp{theta, k};
  const std::string& want = config.quantity;
  const auto wanted = [&](const char* group) {
    return want.empty() || want == group;
  };
  const double mean = mginf::busy_mean(gp);
  std::vector<report::ReportRow> out;

  if (wanted("mean")) {
    std::optional<mc::McEstimate> est;
    if (config.seed) {
      est = mc::estimate(n, splitmix64_at(*config.seed, 0), [&](Rng& rng) {
        return mginf::simulate_busy_period(gp, rng).duration;
      });
    }
    add_row(out, "busy-mean", mean, "takacs-lt", est);
  }

  if (wanted("variance")) {
    const double var = mginf::busy_second_moment(gp) - mean * mean;
    std::optional<mc::McEstimate> est;
    if (config.seed) {
      est = mc::estimate(n, splitmix64_at(*config.seed, 1), [&](Rng& rng) {
        const double d = mginf::simulate_busy_period(gp, rng).duration;
        return (d - mean) * (d - mean);
      });
    }
    add_row(out, "busy-variance", var, "takacs-lt", est);
  }

  if (wanted("tail")) {
    const auto tail = mginf::tail_asymptotics(gp);
    out.push_back(analytic_row("tail-exponent", tail.beta,
                               "busy-tail-asymptotics"));
    out.push_back(analytic_row("tail-prefactor", tail.alpha,
                               "busy-tail-asymptotics"));
  }

  if (wanted("dstar")) {
    const double target = mginf::dstar_lt(gp, 1.0);
    std::optional<mc::McEstimate> est;
    if (config.seed) {
      est = mc::estimate(n, splitmix64_at(*config.seed, 2), [&](Rng& rng) {
        return std::exp(-mginf::sample_dstar_geometric(gp, rng));
      });
    }
    add_row(out, "dstar-lt-at-1", target, "integrated-tail-transform", est);
  }

  return out;
}

double sample_correlation(const std::vector<tagged::TaggedObservation>& obs,
                          std::size_t a, std::size_t b) {
  const double n = static_cast<double>(obs.size());
  double ma = 0, mb = 0;
  for (const auto& o : obs) {
    ma += static_cast<double>(o.occupancies[a]);
    mb += static_cast<double>(o.occupancies[b]);
  }
  ma /= n;
  mb /= n;
  double saa = 0, sbb = 0, sab = 0;
  for (const auto& o : obs) {
    const double da = static_cast<double>(o.occupancies[a]) - ma;
    const double db = static_cast<double>(o.occupancies[b]) - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  return sab / std::sqrt(saa * sbb);
}

std::vector<report::ReportRow> rows_tagged(const ExperimentConfig& config) {
  const double theta = positive_param(config, "theta", 1.0);
  const long long k = index_param(config, "k", 2, 2);
  const long long n = rep_count(config);
  tagged::TaggedParams tp;
  tp.theta = theta;
  for (long long i = 1; i <= k; ++i)
    tp.rates.push_back(static_cast<double>(i));

  const double rho1 = theta;
  const double rho2 = theta / 2.0;
  const double cov = tagged::covariance(tp, 1, 2);
  const double corr = tagged::correlation(1, 2);
  const double product = rho1 * rho2 + cov;

  std::vector<report::ReportRow> out;
  std::optional<mc::McEstimate> e_l1, e_prod;
  std::optional<report::ReportRow> corr_row;
  if (config.seed) {
    Rng rng = derive_stream(*config.seed, 0);
    const auto obs = tagged::simulate_tagged(tp, n, 5.0, rng);
    std::vector<double> l1(obs.size()), prod(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      l1[i] = static_cast<double>(obs[i].occupancies[0]);
      prod[i] = l1[i] * static_cast<double>(obs[i].occupancies[1]);
    }
    e_l1 = mc::from_values(l1);
    e_prod = mc::from_values(prod);
    // Fisher-scale standard error for the empirical correlation.
    const double r = sample_correlation(obs, 0, 1);
    const double se = (1.0 - r * r) / std::sqrt(static_cast<double>(obs.size()));
    corr_row = report::ReportRow{"corr-l1-l2",
                                 corr,
                                 r,
                                 se,
                                 "tagged-pair-correlation",
                                 std::abs(r - corr) <= 4.0 * se};
  }
  add_row(out, "marginal-l1-mean", rho1, "stationary-occupation", e_l1);
  add_row(out, "pair-product-mean", product, "tagged-pair-correlation",
          e_prod);
  if (corr_row)
    out.push_back(*corr_row);
  else
    out.push_back(analytic_row("corr-l1-l2", corr, "tagged-pair-correlation"));
  return out;
}

// Fixed cross-module battery: theta, mu, and n_reps are honored, everything
// else is pinned so a given seed yields byte-identical reports.
std::vector<report::ReportRow> rows_verify(const ExperimentConfig& config) {
  const double theta = positive_param(config, "theta", 1.0);
  const double mu = positive_param(config, "mu", 1.0);
  const long long n = rep_count(config);
  const std::uint64_t master = *config.seed;
  std::vector<report::ReportRow> out;

  const crp::CrpParams cp{theta};
  double total = 0.0;
  crp::for_each_partition(8, [&](const CycleCounts& state) {
    total += crp::ewens_pmf(state, cp);
  });
  out.push_back({"ewens-normalization-n8", total, std::nullopt, std::nullopt,
                 "ewens-sampling-formula", std::abs(total - 1.0) < 1e-10});

  const walk::WalkParams wp{theta / mu};
  const double len_mean = walk::mean_excursion_length(wp, 0);
  const double up_mean = (len_mean - 1.0) / 2.0;
  const double up_var = walk::var_excursion_length(wp) / 4.0;
  const auto hm = walk::height_moments(wp);
  {
    const auto ests = mc::estimate_vec(
        n, splitmix64_at(master, 1), 4,
        [&](Rng& rng, std::vector<double>& sample) {
          const auto ex = walk::simulate_excursion(wp, 0, rng);
          const double u = static_cast<double>(ex.upmoves);
          const double h = static_cast<double>(ex.height);
          sample[0] = static_cast<double>(ex.length);
          sample[1] = (u - up_mean) * (u - up_mean);
          sample[2] = h;
          sample[3] = (h - hm.mean) * (h - hm.mean);
        });
    out.push_back(mc_row("walk-length-mean", len_mean,
                         ests[0], "birth-death-first-return"));
    out.push_back(mc_row("walk-upmove-variance", up_var, ests[1],
                         "birth-death-first-return"));
    out.push_back(mc_row("walk-height-mean", hm.mean, ests[2],
                         "harris-excursion-height"));
    out.push_back(mc_row("walk-height-variance", hm.variance, ests[3],
                         "harris-excursion-height"));
  }
  {
    const auto est =
        mc::estimate(n, splitmix64_at(master, 2), [&](Rng& rng) {
          return walk::simulate_reaches_before(wp, 1, 3, 0, rng) ? 1.0 : 0.0;
        });
    out.push_back(mc_row("walk-ruin-hit3-before0",
                         walk::ruin_probability(wp, 0, 1, 3), est,
                         "gamblers-ruin"));
  }

  const tandem::TandemParams tp{theta, 10};
  {
    const auto ests = mc::estimate_vec(
        n, splitmix64_at(master, 3), 2,
        [&](Rng& rng, std::vector<double>& sample) {
          const auto path = tandem::simulate_tandem(tp, 1.0, CycleCounts{}, rng);
          const auto& rec = tandem::state_at(path, 1.0);
          sample[0] = static_cast<double>(rec.state.count_of_size(1));
          sample[1] = static_cast<double>(rec.cycles_created);
        });
    out.push_back(mc_row("tandem-c1-mean-t1",
                         tandem::transient_marginal_mean(tp, 1, 1.0), ests[0],
                         "transient-poisson-marginals"));
    out.push_back(mc_row("tandem-cycles-mean-t1", theta, ests[1],
                         "poisson-counting-process"));
  }

  const mminf::QueueParams qp{theta, mu};
  const double d_mean = mminf::mean_duration(qp, 0);
  const double d_var = mminf::duration_second_moment(qp) - d_mean * d_mean;
  {
    const auto ests = mc::estimate_vec(
        n, splitmix64_at(master, 4), 3,
        [&](Rng& rng, std::vector<double>& sample) {
          const auto ex = mminf::simulate_queue_excursion(qp, 0, rng);
          sample[0] = ex.duration;
          sample[1] = static_cast<double>(ex.arrivals) - theta * ex.duration;
          sample[2] = (ex.duration - d_mean) * (ex.duration - d_mean);
        });
    out.push_back(mc_row("mminf-duration-mean", d_mean, ests[0],
                         "birth-death-busy-period"));
    out.push_back(mc_row("mminf-wald-gap", 0.0, ests[1], "wald-identity"));
    out.push_back(mc_row("mminf-duration-variance", d_var, ests[2],
                         "busy-period-variance"));
  }

  const mginf::MgParams gp{theta, 2};
  const double busy_mean = mginf::busy_mean(gp);
  const double busy_var =
      mginf::busy_second_moment(gp) - busy_mean * busy_mean;
  {
    const auto ests = mc::estimate_vec(
        n, splitmix64_at(master, 5), 2,
        [&](Rng& rng, std::vector<double>& sample) {
          const double d = mginf::simulate_busy_period(gp, rng).duration;
          sample[0] = d;
          sample[1] = (d - busy_mean) * (d - busy_mean);
        });
    out.push_back(mc_row("busy-mean-k2", busy_mean, ests[0], "takacs-lt"));
    out.push_back(mc_row("busy-variance-k2", busy_var, ests[1], "takacs-lt"));
  }
  out.push_back(analytic_row("busy-tail-exponent-k2",
                             mginf::tail_asymptotics(gp).beta,
                             "busy-tail-asymptotics"));

  {
    tagged::TaggedParams tg;
    tg.theta = theta;
    tg.rates = {1.0, 2.0};
    const double product =
        theta * (theta / 2.0) + tagged::covariance(tg, 1, 2);
    Rng rng = derive_stream(master, 6);
    const auto obs = tagged::simulate_tagged(tg, n, 5.0, rng);
    std::vector<double> prod(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i)
      prod[i] = static_cast<double>(obs[i].occupancies[0]) *
                static_cast<double>(obs[i].occupancies[1]);
    out.push_back(mc_row("tagged-pair-product", product,
                         mc::from_values(prod), "tagged-pair-correlation"));
  }

  {
    const auto pr = tandem::pascalisation_check(tp, 1.0, 0.5, 40);
    out.push_back({"pascalisation-residual", pr.residual, std::nullopt,
                   std::nullopt, "negative-binomial-pascalisation",
                   pr.residual <= pr.bound && pr.residual < 1e-8});
  }
  {
    const double limit = tandem::prm_mean_measure_tail(theta, 1.0);
    const double gap =
        std::abs(tandem::prm_prelimit_tail(theta, 10.0, 1.0) - limit) / limit;
    out.push_back({"largest-cycle-prelimit-gap", gap, std::nullopt,
                   std::nullopt, "largest-cycle-limit", gap < 0.01});
  }

  return out;
}

void merge_config_file(ExperimentConfig& cfg, const std::string& path,
                       const std::set<std::string>& from_flags) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line =
        1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw UsageError("config '" + path + "': malformed JSON at line " +
                     std::to_string(line) + ": " + e.what());
  }
  if (!doc.is_object())
    throw UsageError("config '" + path + "': expected a JSON object");

  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (!kConfigKeys.count(key))
      throw UsageError("config '" + path + "': unknown key '" + key + "'; " +
                       valid_keys_note());
    if (from_flags.count(key)) continue;  // flags override the file
    const auto& value = it.value();
    if (key == "seed") {
      if (!value.is_number_integer() || value.get<long long>() < 0)
        throw UsageError("config '" + path +
                         "': seed must be a nonnegative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "checkpoints") {
      if (!value.is_array())
        throw UsageError("config '" + path +
                         "': checkpoints must be an array of numbers");
      cfg.checkpoints.clear();
      for (const auto& v : value) {
        if (!v.is_number())
          throw UsageError("config '" + path +
                           "': checkpoints must be an array of numbers");
        cfg.checkpoints.push_back(v.get<double>());
      }
    } else if (key == "quantity" || key == "output") {
      if (!value.is_string())
        throw UsageError("config '" + path + "': " + key +
                         " must be a string");
      (key == "quantity" ? cfg.quantity : cfg.output_path) =
          value.get<std::string>();
    } else {
      if (!value.is_number())
        throw UsageError("config '" + path + "': " + key +
                         " must be a number");
      cfg.params[key] = value.get<double>();
    }
  }
}

const std::set<std::string> kWalkGroups = {"height-moments",
                                           "excursion-moments", "occupation",
                                           "ruin"};
const std::set<std::string> kBusyGroups = {"mean", "variance", "tail",
                                           "dstar"};

void validate_structure(const ExperimentConfig& cfg) {
  if (cfg.command == "verify" && !cfg.seed)
    throw UsageError("verify requires --seed so the battery is reproducible");
  if (!cfg.quantity.empty()) {
    if (cfg.command == "walk") {
      if (!kWalkGroups.count(cfg.quantity))
        throw UsageError(
            "unknown walk quantity '" + cfg.quantity +
            "'; one of: height-moments excursion-moments occupation ruin");
    } else if (cfg.command == "busy") {
      if (!kBusyGroups.count(cfg.quantity))
        throw UsageError("unknown busy quantity '" + cfg.quantity +
                         "'; one of: mean variance tail dstar");
    } else {
      throw UsageError("--quantity is not accepted by '" + cfg.command + "'");
    }
  }
  if (!cfg.checkpoints.empty() && cfg.command != "tandem")
    throw UsageError("--checkpoints is only accepted by 'tandem'");
}

std::string json_mirror_path(const std::string& csv_path) {
  if (csv_path.size() >= 4 &&
      csv_path.compare(csv_path.size() - 4, 4, ".csv") == 0)
    return csv_path.substr(0, csv_path.size() - 4) + ".json";
  return csv_path + ".json";
}

}  // namespace

double ExperimentConfig::get(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::string usage_text() {
  return
      "usage: cyclequeue <command> [flags]\n"
      "\n"
      "commands\n"
      "  crp     Ewens cycle counts: pmf normalization, mean cycle count at\n"
      "          degree --k (default 100)\n"
      "  walk    singleton birth-death chain; --quantity one of\n"
      "          height-moments excursion-moments occupation ruin\n"
      "  tandem  continuous-time cycle counts at --checkpoints (or --t-end)\n"
      "  mminf   busy-period functionals of the M/M/inf station at level --c\n"
      "  busy    M/G/inf busy period, service = max of --k unit-rate\n"
      "          exponentials; --quantity one of mean variance tail dstar\n"
      "  tagged  stationary phase occupancies seen by a tagged arrival,\n"
      "          phases 1..--k with rates 1..k\n"
      "  verify  fixed cross-module battery; requires --seed\n"
      "\n"
      "flags\n"
      "  --theta X        arrival rate (default 1)\n"
      "  --mu X           per-task service rate (default 1)\n"
      "  --rho X          walk parameter (default theta/mu)\n"
      "  --k N            degree / service shape / phase count\n"
      "  --c N            reflection level (default 0)\n"
      "  --t-end X        horizon for tandem (default 1)\n"
      "  --n-reps N       Monte Carlo replications (default 100000)\n"
      "  --seed N         master seed; omit for analytic-only rows\n"
      "  --checkpoints A,B,...  tandem observation times\n"
      "  --quantity NAME  restrict to one row group (walk, busy)\n"
      "  --config PATH    JSON file with the same keys; flags win\n"
      "  --output PATH    write csv there plus a .json mirror\n"
      "\n"
      "exit status: 0 all pass flags hold, 1 a check failed or a parameter\n"
      "was out of range, 2 the invocation was malformed\n";
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  if (args.empty()) throw UsageError("missing command");
  ExperimentConfig cfg;
  cfg.command = args[0];
  if (!kCommands.count(cfg.command))
    throw UsageError("unknown command '" + cfg.command +
                     "'; one of: crp walk tandem mminf busy tagged verify");

  CLI::App app{"cyclequeue"};
  app.set_help_flag();  // usage comes from the UsageError path

  double theta = 0, mu = 0, rho = 0, k = 0, c = 0, t_end = 0, n_reps = 0;
  std::uint64_t seed = 0;
  std::string config_path, quantity, output;
  std::vector<double> checkpoints;

  std::map<std::string, CLI::Option*> opts;
  opts["theta"] = app.add_option("--theta", theta);
  opts["mu"] = app.add_option("--mu", mu);
  opts["rho"] = app.add_option("--rho", rho);
  opts["k"] = app.add_option("--k", k);
  opts["c"] = app.add_option("--c", c);
  opts["t_end"] = app.add_option("--t-end", t_end);
  opts["n_reps"] = app.add_option("--n-reps", n_reps);
  opts["seed"] = app.add_option("--seed", seed);
  opts["checkpoints"] =
      app.add_option("--checkpoints", checkpoints)->delimiter(',');
  opts["quantity"] = app.add_option("--quantity", quantity);
  opts["output"] = app.add_option("--output", output);
  CLI::Option* config_opt = app.add_option("--config", config_path);

  try {
    std::vector<std::string> rest(args.begin() + 1, args.end());
    std::reverse(rest.begin(), rest.end());  // CLI11 pops from the back
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string(e.what()) + "; " + valid_keys_note());
  }

  std::set<std::string> from_flags;
  for (const auto& [key, opt] : opts)
    if (opt->count() > 0) from_flags.insert(key);

  for (const char* key : {"theta", "mu", "rho", "k", "c", "t_end", "n_reps"}) {
    if (!from_flags.count(key)) continue;
    const double* bound = key == std::string("theta") ? &theta
                          : key == std::string("mu")  ? &mu
                          : key == std::string("rho") ? &rho
                          : key == std::string("k")   ? &k
                          : key == std::string("c")   ? &c
                          : key == std::string("t_end") ? &t_end
                                                        : &n_reps;
    cfg.params[key] = *bound;
  }
  if (from_flags.count("seed")) cfg.seed = seed;
  if (from_flags.count("checkpoints")) cfg.checkpoints = checkpoints;
  if (from_flags.count("quantity")) cfg.quantity = quantity;
  if (from_flags.count("output")) cfg.output_path = output;

  if (config_opt->count() > 0) merge_config_file(cfg, config_path, from_flags);
  validate_structure(cfg);
  return cfg;
}

std::vector<report::ReportRow> build_rows(const ExperimentConfig& config) {
  if (config.command == "crp") return rows_crp(config);
  if (config.command == "walk") return rows_walk(config);
  if (config.command == "tandem") return rows_tandem(config);
  if (config.command == "mminf") return rows_mminf(config);
  if (config.command == "busy") return rows_busy(config);
  if (config.command == "tagged") return rows_tagged(config);
  if (config.command == "verify") return rows_verify(config);
  throw UsageError("unknown command '" + config.command + "'");
}

int run(const ExperimentConfig& config) {
  const auto rows = build_rows(config);
  if (config.output_path.empty()) {
    report::write_csv(std::cout, rows);
  } else {
    std::ofstream csv(config.output_path);
    if (!csv)
      throw std::runtime_error("cannot open output file '" +
                               config.output_path + "'");
    report::write_csv(csv, rows);
    const std::string jpath = json_mirror_path(config.output_path);
    std::ofstream js(jpath);
    if (!js)
      throw std::runtime_error("cannot open output file '" + jpath + "'");
    report::write_json(js, rows);
  }
  return report::all_pass(rows) ? 0 : 1;
}

int main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (const auto& a : args)
    if (a == "--help" || a == "-h") {
      std::cout << usage_text();
      return 0;
    }
  try {
    if (args.empty()) {
      std::cerr << usage_text();
      return 2;
    }
    return run(parse_config(args));
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << usage_text();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cq::cli
