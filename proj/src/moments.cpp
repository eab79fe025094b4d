#include "sbm/moments.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbm/cycles.hpp"
#include "sbm/errors.hpp"
#include "sbm/parallel.hpp"
#include "sbm/stats.hpp"

namespace sbm {
namespace {

void require_weight_domain(double a, double b, std::size_t n) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("a and b must be positive");
  if (!(static_cast<double>(n) > (a + b) / 2.0))
    throw std::invalid_argument("edge weights need n > (a+b)/2");
}

// sum_i exp(log_terms[i]) * counts[i], shifted by the largest exponent.
double weighted_exp_sum(const std::vector<double>& log_terms,
                        const std::vector<double>& multiplicity, double& log_scale) {
  log_scale = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < log_terms.size(); ++i)
    if (multiplicity[i] > 0.0) log_scale = std::max(log_scale, log_terms[i]);
  CompensatedSum sum;
  for (std::size_t i = 0; i < log_terms.size(); ++i)
    if (multiplicity[i] > 0.0) sum.add(multiplicity[i] * std::exp(log_terms[i] - log_scale));
  return sum.value();
}

// Adjacency rows as bit masks, for graphs with at most 24 vertices.
std::vector<std::uint32_t> adjacency_masks(const SimpleGraph& g) {
  std::vector<std::uint32_t> rows(g.num_vertices(), 0);
  for (const auto& e : g.edges()) {
    rows[e.u] |= 1u << e.v;
    rows[e.v] |= 1u << e.u;
  }
  return rows;
}

// hist[plus_count * (m+1) + same_edges]: number of labelings of the vertex
// set with that many +1 labels and that many edges with agreeing endpoints.
std::vector<std::uint64_t> agreement_histogram(const SimpleGraph& g) {
  const std::size_t n = g.num_vertices();
  const std::size_t m = g.num_edges();
  const auto rows = adjacency_masks(g);
  const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1u);
  std::vector<std::uint64_t> hist((n + 1) * (m + 1), 0);
  std::uint32_t mask = 0;  // bit v set means label +1
  std::size_t plus = 0;
  std::size_t same = m;    // all labels equal
  hist[plus * (m + 1) + same] = 1;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const int v = std::countr_zero(i);
    const bool is_plus = (mask >> v) & 1u;
    const std::uint32_t agreeing = is_plus ? mask : (~mask & full);
    const auto s = static_cast<std::size_t>(std::popcount(rows[v] & agreeing));
    const std::size_t deg = static_cast<std::size_t>(std::popcount(rows[v]));
    same = same + deg - 2 * s;
    mask ^= 1u << v;
    plus = is_plus ? plus - 1 : plus + 1;
    ++hist[plus * (m + 1) + same];
  }
  return hist;
}

}  // namespace

double edge_weight(bool present, bool same_label, double a, double b, std::size_t n) {
  require_weight_domain(a, b, n);
  const EdgeWeightSpec w{a, b, n};
  if (present) return same_label ? w.present_same() : w.present_diff();
  return same_label ? w.absent_same() : w.absent_diff();
}

double expected_edge_weight(bool same_label, double a, double b, std::size_t n) {
  const double p = (a + b) / (2.0 * static_cast<double>(n));
  return p * edge_weight(true, same_label, a, b, n) +
         (1.0 - p) * edge_weight(false, same_label, a, b, n);
}

double exact_Y(const SimpleGraph& g, double a, double b) {
  const std::size_t n = g.num_vertices();
  if (n > kMaxExactYVertices)
    throw BudgetExceeded("exact_Y enumerates 2^n labelings; n = " + std::to_string(n) +
                         " exceeds " + std::to_string(kMaxExactYVertices));
  if (n <= 1) return 1.0;  // no pairs
  require_weight_domain(a, b, n);
  const EdgeWeightSpec w{a, b, n};
  const double l_ps = std::log(w.present_same()), l_pd = std::log(w.present_diff());
  const double l_as = std::log(w.absent_same()), l_ad = std::log(w.absent_diff());
  const std::size_t m = g.num_edges();
  const auto hist = agreement_histogram(g);

  std::vector<double> logs, mult;
  for (std::size_t plus = 0; plus <= n; ++plus) {
    const double minus = static_cast<double>(n - plus);
    const double p = static_cast<double>(plus);
    const double same_pairs = p * (p - 1) / 2 + minus * (minus - 1) / 2;
    const double diff_pairs = p * minus;
    for (std::size_t same = 0; same <= m; ++same) {
      const std::uint64_t count = hist[plus * (m + 1) + same];
      if (!count) continue;
      const double se = static_cast<double>(same), de = static_cast<double>(m - same);
      logs.push_back(se * l_ps + de * l_pd + (same_pairs - se) * l_as + (diff_pairs - de) * l_ad);
      mult.push_back(static_cast<double>(count));
    }
  }
  double scale = 0.0;
  const double sum = weighted_exp_sum(logs, mult, scale);
  return sum * std::exp(scale - static_cast<double>(n) * std::log(2.0));
}

double second_moment_limit(double t) {
  if (!(t >= 0.0 && t < 1.0))
    throw std::domain_error("second moment limit needs 0 <= t < 1 (diverges at t >= 1)");
  return std::exp(-t / 2.0 - t * t / 4.0) / std::sqrt(1.0 - t);
}

double cross_moment(bool sigma_same, bool tau_same, double a, double b, std::size_t n) {
  require_weight_domain(a, b, n);
  const double p = (a + b) / (2.0 * static_cast<double>(n));
  return p * edge_weight(true, sigma_same, a, b, n) * edge_weight(true, tau_same, a, b, n) +
         (1.0 - p) * edge_weight(false, sigma_same, a, b, n) * edge_weight(false, tau_same, a, b, n);
}

double cross_moment(PairAgreement agreement, double a, double b, std::size_t n) {
  return cross_moment(true, agreement == PairAgreement::agree, a, b, n);
}

double cross_moment_expansion(PairAgreement agreement, double a, double b, std::size_t n) {
  const double nd = static_cast<double>(n);
  const double t = (a - b) * (a - b) / (2.0 * (a + b));
  const double correction = t / nd + (a - b) * (a - b) / (4.0 * nd * nd);
  return agreement == PairAgreement::agree ? 1.0 + correction : 1.0 - correction;
}

double mgf_binomial(std::size_t n, double s) {
  if (!(s < 1.0)) throw std::domain_error("mgf_binomial needs s < 1");
  if (n == 0 || n > 1'000'000) throw std::invalid_argument("mgf_binomial needs 1 <= n <= 1e6");
  const double nd = static_cast<double>(n);
  // Binomial weights are normalised by their own sum, which cancels the
  // rounding in lgamma.
  std::vector<double> log_pmf(n + 1), logs(n + 1), ones(n + 1, 1.0);
  for (std::size_t j = 0; j <= n; ++j) {
    const double jd = static_cast<double>(j);
    const double z2 = (2.0 * jd - nd) * (2.0 * jd - nd) / nd;
    log_pmf[j] = std::lgamma(nd + 1.0) - std::lgamma(jd + 1.0) - std::lgamma(nd - jd + 1.0) -
                 nd * std::log(2.0);
    logs[j] = log_pmf[j] + s * z2 / 2.0;
  }
  double scale = 0.0, norm_scale = 0.0;
  const double sum = weighted_exp_sum(logs, ones, scale);
  const double norm = weighted_exp_sum(log_pmf, ones, norm_scale);
  return sum / norm * std::exp(scale - norm_scale);
}

double cycle_weight_sum(const SimpleGraph& h, double a, double b) {
  if (h.num_vertices() > kMaxExactYVertices)
    throw BudgetExceeded("cycle_weight_sum enumerates 2^|V(h)| labelings; |V(h)| too large");
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("a and b must be positive");
  const std::size_t n = h.num_vertices(), m = h.num_edges();
  if (n == 0) return 1.0;
  const double agree_w = 2.0 * a / (a + b), disagree_w = 2.0 * b / (a + b);
  const auto hist = agreement_histogram(h);
  std::vector<std::uint64_t> by_agree(m + 1, 0);
  for (std::size_t plus = 0; plus <= n; ++plus)
    for (std::size_t same = 0; same <= m; ++same) by_agree[same] += hist[plus * (m + 1) + same];
  CompensatedSum sum;
  for (std::size_t same = 0; same <= m; ++same)
    if (by_agree[same])
      sum.add(static_cast<double>(by_agree[same]) * std::pow(agree_w, static_cast<double>(same)) *
              std::pow(disagree_w, static_cast<double>(m - same)));
  return sum.value();
}

double subgraph_series_partial(double t, int k_max) {
  CompensatedSum sum;
  for (int k = 3; k <= k_max; ++k) sum.add(std::pow(t, k) / (2.0 * k));
  return sum.value();
}

double subgraph_series_closed_form(double t) {
  if (!(t >= 0.0 && t < 1.0)) throw std::domain_error("series converges for 0 <= t < 1");
  return -0.5 * (std::log1p(-t) + t + t * t / 2.0);
}

double cycle_lambda(double a, double b, int k) {
  return std::pow((a + b) / 2.0, k) / (2.0 * k);
}

double cycle_delta(double a, double b, int k) { return std::pow((a - b) / (a + b), k); }

double exact_second_moment(double a, double b, std::size_t n) {
  require_weight_domain(a, b, n);
  if (n > 400) throw BudgetExceeded("exact_second_moment is O(n^3); n > 400 refused");
  // Classes by (sigma, tau): 0 = (+,+), 1 = (+,-), 2 = (-,+), 3 = (-,-).
  const int sigma[4] = {1, 1, -1, -1}, tau[4] = {1, -1, 1, -1};
  double log_cm[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      log_cm[i][j] = std::log(cross_moment(sigma[i] == sigma[j], tau[i] == tau[j], a, b, n));
  const double nd = static_cast<double>(n);
  std::vector<double> logs, ones;
  for (std::size_t n0 = 0; n0 <= n; ++n0)
    for (std::size_t n1 = 0; n0 + n1 <= n; ++n1)
      for (std::size_t n2 = 0; n0 + n1 + n2 <= n; ++n2) {
        const double c[4] = {static_cast<double>(n0), static_cast<double>(n1),
                             static_cast<double>(n2), static_cast<double>(n - n0 - n1 - n2)};
        double lw = std::lgamma(nd + 1.0);
        for (double ci : c) lw -= std::lgamma(ci + 1.0);
        for (int i = 0; i < 4; ++i) {
          lw += c[i] * (c[i] - 1.0) / 2.0 * log_cm[i][i];
          for (int j = i + 1; j < 4; ++j) lw += c[i] * c[j] * log_cm[i][j];
        }
        logs.push_back(lw - 2.0 * nd * std::log(2.0));
        ones.push_back(1.0);
      }
  double scale = 0.0;
  const double sum = weighted_exp_sum(logs, ones, scale);
  return sum * std::exp(scale);
}

double overlap(std::span<const Label> sigma, std::span<const Label> tau) {
  if (sigma.size() != tau.size() || sigma.empty())
    throw std::invalid_argument("overlap needs equal nonempty labelings");
  long long s = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) s += sigma[i] * tau[i];
  return static_cast<double>(s) / static_cast<double>(sigma.size());
}

MomentReport conditioned_moment_check(double a, double b, std::size_t n, int k,
                                      std::size_t trials, const RngStream& rng,
                                      unsigned threads) {
  require_weight_domain(a, b, n);
  if (n > kMaxExactYVertices) throw BudgetExceeded("conditioned moments need n <= 24");
  if (k < 3) throw std::invalid_argument("k must be at least 3");
  if (trials < 2) throw std::invalid_argument("need at least 2 trials");
  const double c = (a + b) / 2.0;
  struct Trial {
    double y = 0.0;
    double x = 0.0;
  };
  const auto results = parallel_map(trials, threads, [&](std::size_t i) {
    RngStream stream = rng.split(i);
    const LabeledGraph g = sample_er(n, c, stream);
    Trial t;
    t.y = exact_Y(g.graph(), a, b);
    t.x = static_cast<double>(count_cycles_exact(g.graph(), k).count(k));
    return t;
  });

  MomentReport r;
  r.n = n;
  r.a = a;
  r.b = b;
  r.k = k;
  r.trials = trials;
  r.t = (a - b) * (a - b) / (2.0 * (a + b));
  std::vector<double> ys, y2s, yxs, xs;
  for (const auto& t : results) {
    ys.push_back(t.y);
    y2s.push_back(t.y * t.y);
    yxs.push_back(t.y * t.x);
    xs.push_back(t.x);
  }
  const auto sy = summarize(ys), sy2 = summarize(y2s), syx = summarize(yxs), sx = summarize(xs);
  r.y_samples = ys;
  r.mean_y = sy.mean;
  r.se_mean_y = sy.stderr_mean;
  r.mean_y2 = sy2.mean;
  r.se_mean_y2 = sy2.stderr_mean;
  r.mean_yx = syx.mean;
  r.se_mean_yx = syx.stderr_mean;
  r.mean_x = sx.mean;
  r.exact_y2 = n <= 400 ? exact_second_moment(a, b, n) : std::nan("");
  r.limit_y2 = r.t < 1.0 ? second_moment_limit(r.t) : std::nan("");
  r.lambda_k = cycle_lambda(a, b, k);
  r.lambda_k_n = er_cycle_mean(n, c, k);
  r.delta_k = cycle_delta(a, b, k);
  r.predicted_yx = r.lambda_k_n * (1.0 + r.delta_k);
  r.ratio = r.mean_yx / r.predicted_yx;
  r.se_ratio = r.se_mean_yx / r.predicted_yx;
  const double self = r.mean_yx / r.mean_y;
  r.normalized_ratio = self / r.predicted_yx;
  std::vector<double> residual(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) residual[i] = yxs[i] - self * ys[i];
  r.se_normalized_ratio = summarize(residual).stderr_mean / r.mean_y / r.predicted_yx;
  return r;
}

}  // namespace sbm
