#include "sbm/estimation.hpp"

#include <cmath>
#include <limits>

#include "sbm/parallel.hpp"
#include "sbm/stats.hpp"

namespace sbm {

int default_k(std::size_t n) {
  const double lg = std::log(static_cast<double>(std::max<std::size_t>(n, 1)));
  return std::max(3, static_cast<int>(std::floor(std::pow(lg, 0.25))));
}

Estimate estimate_from_counts(std::size_t n, std::size_t num_edges, std::uint64_t x_k, int k) {
  if (n < 3) throw std::invalid_argument("estimator needs at least 3 vertices");
  if (k < 3) throw std::invalid_argument("k must be at least 3");
  Estimate e;
  e.n = n;
  e.num_edges = num_edges;
  e.k_used = k;
  e.x_k = x_k;
  e.d_hat = 2.0 * static_cast<double>(num_edges) / static_cast<double>(n);
  e.raw_statistic = 2.0 * k * static_cast<double>(x_k) - std::pow(e.d_hat, k);
  if (e.raw_statistic > 0.0) {
    e.f_hat = std::pow(e.raw_statistic, 1.0 / k);
    e.a_hat = e.d_hat + *e.f_hat;
    e.b_hat = e.d_hat - *e.f_hat;
  }
  return e;
}

Estimate estimate_params(const SimpleGraph& g, std::optional<int> k, unsigned threads) {
  const int k_used = k.value_or(default_k(g.num_vertices()));
  if (g.num_vertices() < 3) throw std::invalid_argument("estimator needs at least 3 vertices");
  if (k_used < 3) throw std::invalid_argument("k must be at least 3");
  CycleCensus census = g.num_vertices() <= kExactCensusMaxVertices
                           ? count_cycles_exact(g, k_used)
                           : count_cycles_nb(g, k_used, threads);
  Estimate e = estimate_from_counts(g.num_vertices(), g.num_edges(), census.count(k_used), k_used);
  e.method = census.method;
  e.census_approximate = census.approximate();
  return e;
}

PooledEstimate pool_estimates(std::span<const Estimate> estimates) {
  if (estimates.empty()) throw std::invalid_argument("no estimates to pool");
  PooledEstimate p;
  p.trials = estimates.size();
  p.k = estimates.front().k_used;
  std::vector<double> raw, d;
  for (const auto& e : estimates) {
    if (e.k_used != p.k) throw std::invalid_argument("pooled estimates must share k");
    raw.push_back(e.raw_statistic);
    d.push_back(e.d_hat);
  }
  const auto raw_summary = summarize(raw);
  p.mean_raw = raw_summary.mean;
  p.se_raw = raw_summary.stderr_mean;
  p.mean_d_hat = summarize(d).mean;
  if (p.mean_raw > 0.0) {
    p.f_hat = std::pow(p.mean_raw, 1.0 / p.k);
    p.a_hat = p.mean_d_hat + *p.f_hat;
    p.b_hat = p.mean_d_hat - *p.f_hat;
  }
  return p;
}

std::vector<Estimate> estimator_trials(const ModelParams& params, int k, std::size_t trials,
                                       const RngStream& rng, unsigned threads) {
  params.validate();
  return parallel_map(trials, threads, [&](std::size_t i) {
    RngStream stream = rng.split(i);
    const LabeledGraph g = sample_sbm(params, stream);
    return estimate_params(g.graph(), k, 1);
  });
}

ErrorProfile a_error_profile(std::span<const Estimate> estimates, double a,
                             const RngStream& bootstrap_rng) {
  ErrorProfile profile;
  profile.trials = estimates.size();
  if (estimates.empty()) return profile;
  profile.n = estimates.front().n;
  std::vector<double> errors;
  for (const auto& e : estimates) {
    if (e.a_hat) {
      errors.push_back(std::abs(*e.a_hat - a));
    } else {
      errors.push_back(std::numeric_limits<double>::infinity());
      ++profile.undefined;
    }
  }
  profile.median_abs_error = median(errors);
  profile.stderr_median = bootstrap_median_se(errors, 400, bootstrap_rng);
  return profile;
}

std::string to_string(Decision decision) {
  return decision == Decision::sbm_like ? "sbm-like" : "er-like";
}

double distinguishing_rho(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("a and b must be positive");
  const double gap = (a - b) * (a - b);
  if (!(gap > 2.0 * (a + b)))
    throw ContiguousRegimeError(
        "indistinguishable regime: (a-b)^2 = " + std::to_string(gap) +
        " <= 2(a+b) = " + std::to_string(2.0 * (a + b)) +
        "; the planted and null models are mutually contiguous here");
  const double lower = std::sqrt((a + b) / 2.0);
  const double upper = (a - b) / 2.0;
  return std::sqrt(lower * upper);
}

DistinguishResult distinguish(const SimpleGraph& g, double a, double b, int k, unsigned threads) {
  if (k < 3) throw std::invalid_argument("k must be at least 3");
  DistinguishResult r;
  r.k = k;
  r.rho = distinguishing_rho(a, b);
  r.mean_er = PoissonPrediction::compute(a, b, k).mean_er;
  r.threshold = r.mean_er + std::pow(r.rho, k);
  const CycleCensus census = g.num_vertices() <= kExactCensusMaxVertices
                                 ? count_cycles_exact(g, k)
                                 : count_cycles_nb(g, k, threads);
  r.x_k = census.count(k);
  r.decision = static_cast<double>(r.x_k) > r.threshold ? Decision::sbm_like : Decision::er_like;
  r.zscore = (static_cast<double>(r.x_k) - r.mean_er) / std::sqrt(r.mean_er);
  return r;
}

MeanGapReport mean_gap_study(const ModelParams& params, int k, std::size_t trials,
                             const RngStream& rng, unsigned threads) {
  params.validate();
  if (trials < 2) throw std::invalid_argument("need at least 2 trials per model");
  const double null_mean = PoissonPrediction::compute(params.a, params.b, k).mean_er;
  auto counts = parallel_map(2 * trials, threads, [&](std::size_t i) {
    RngStream stream = rng.split(i);
    const LabeledGraph g = i % 2 == 0 ? sample_sbm(params, stream)
                                      : sample_er(params.n, params.null_intensity(), stream);
    const auto census = g.num_vertices() <= kExactCensusMaxVertices
                            ? count_cycles_exact(g.graph(), k)
                            : count_cycles_nb(g.graph(), k, 1);
    return static_cast<double>(census.count(k));
  });
  std::vector<double> planted, null;
  std::size_t planted_reject = 0, null_reject = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const bool reject = (counts[i] - null_mean) / std::sqrt(null_mean) > 3.0;
    if (i % 2 == 0) {
      planted.push_back(counts[i]);
      planted_reject += reject;
    } else {
      null.push_back(counts[i]);
      null_reject += reject;
    }
  }
  const auto s = summarize(planted), e = summarize(null);
  MeanGapReport r;
  r.params = params;
  r.k = k;
  r.trials = trials;
  r.mean_sbm = s.mean;
  r.mean_er = e.mean;
  r.gap = s.mean - e.mean;
  r.se_gap = std::sqrt(s.stderr_mean * s.stderr_mean + e.stderr_mean * e.stderr_mean);
  r.predicted_gap = std::pow(params.f(), k) / (2.0 * k);
  r.z_power = static_cast<double>(planted_reject) / static_cast<double>(trials);
  r.z_size = static_cast<double>(null_reject) / static_cast<double>(trials);
  r.pass = std::abs(r.gap - r.predicted_gap) <= 4.0 * r.se_gap;
  return r;
}

}  // namespace sbm
