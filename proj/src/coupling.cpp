#include "sbm/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "sbm/parallel.hpp"
#include "sbm/stats.hpp"

namespace sbm {

int asymptotic_radius(std::size_t n, double a, double b) {
  const double r = std::log(static_cast<double>(n)) / (10.0 * std::log(2.0 * (a + b)));
  return std::max(0, static_cast<int>(std::floor(r)));
}

namespace {

struct BallTrial {
  std::uint8_t tree = 0;
  std::uint8_t a_violation = 0;
  std::uint8_t b_violation = 0;
  std::uint8_t c_violation = 0;
  double growth = 0.0;
  double balance = 0.0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> offspring;
};

BallTrial examine_ball(const LabeledGraph& lg, VertexId root, int radius, double a, double b) {
  const SimpleGraph& g = lg.graph();
  const std::size_t n = g.num_vertices();
  std::vector<int> dist(n, -1);
  std::vector<VertexId> order{root};
  dist[root] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const VertexId x = order[head];
    if (dist[x] == radius) continue;
    for (VertexId w : g.neighbors(x))
      if (dist[w] < 0) {
        dist[w] = dist[x] + 1;
        order.push_back(w);
      }
  }

  BallTrial t;
  std::vector<std::size_t> level_size(static_cast<std::size_t>(radius) + 1, 0);
  std::size_t edges = 0;
  for (VertexId x : order) {
    ++level_size[dist[x]];
    int parents = 0;
    for (VertexId w : g.neighbors(x)) {
      if (dist[w] < 0) continue;
      if (w > x) ++edges;
      if (dist[w] == dist[x] - 1) ++parents;
      if (dist[w] == dist[x] && dist[x] >= 1) t.b_violation = 1;
    }
    if (parents >= 2) t.a_violation = 1;
  }
  t.tree = edges + 1 == order.size() ? 1 : 0;

  const double log_n = std::log(static_cast<double>(n));
  for (int s = 0; s <= radius; ++s) {
    const double envelope = std::pow(2.0 * (a + b), s) * log_n;
    const double ratio = static_cast<double>(level_size[s]) / envelope;
    t.growth = std::max(t.growth, ratio);
    if (ratio > 1.0) t.c_violation = 1;
  }

  long long balance = 0;
  for (Label l : lg.labels()) balance += l;
  t.balance = std::abs(static_cast<double>(balance)) / std::pow(static_cast<double>(n), 0.75);

  if (t.tree && radius >= 1) {
    for (VertexId x : order) {
      if (dist[x] != radius - 1) continue;
      std::uint32_t same = 0, diff = 0;
      for (VertexId w : g.neighbors(x))
        if (dist[w] == radius) (lg.label(w) == lg.label(x) ? same : diff)++;
      t.offspring.emplace_back(same, diff);
    }
  }
  return t;
}

}  // namespace

CouplingReport tree_likeness(const ModelParams& params, int radius, std::size_t trials,
                             const RngStream& rng, unsigned threads) {
  params.validate();
  if (radius < 0) throw std::invalid_argument("radius must be nonnegative");
  if (trials < 100) throw std::invalid_argument("tree_likeness needs at least 100 trials");
  const auto results = parallel_map(trials, threads, [&](std::size_t i) {
    RngStream stream = rng.split(i);
    const LabeledGraph g = sample_sbm(params, stream);
    const auto root = static_cast<VertexId>(stream.uniform_int(params.n));
    return examine_ball(g, root, radius, params.a, params.b);
  });

  CouplingReport report;
  report.params = params;
  report.radius = radius;
  report.trials = trials;
  report.asymptotic_radius = asymptotic_radius(params.n, params.a, params.b);
  std::size_t trees = 0, av = 0, bv = 0, cv = 0;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> histogram;
  std::vector<std::uint64_t> same_counts;
  for (const auto& t : results) {
    trees += t.tree;
    av += t.a_violation;
    bv += t.b_violation;
    cv += t.c_violation;
    report.boundary_growth = std::max(report.boundary_growth, t.growth);
    report.balance_statistic = std::max(report.balance_statistic, t.balance);
    for (const auto& split : t.offspring) {
      ++histogram[split];
      same_counts.push_back(split.first);
    }
  }
  const double total = static_cast<double>(trials);
  report.tree_fraction = static_cast<double>(trees) / total;
  report.a_violation_rate = static_cast<double>(av) / total;
  report.b_violation_rate = static_cast<double>(bv) / total;
  report.c_violation_rate = static_cast<double>(cv) / total;
  report.offspring_samples = same_counts.size();

  if (!same_counts.empty()) {
    const double samples = static_cast<double>(same_counts.size());
    const double ms = params.a / 2.0, md = params.b / 2.0;
    // |emp - pmf| summed over the observed cells, plus the model mass on
    // cells never observed.
    double diff_sum = 0.0, covered = 0.0;
    for (const auto& [split, count] : histogram) {
      const double model = poisson_pmf(split.first, ms) * poisson_pmf(split.second, md);
      diff_sum += std::abs(static_cast<double>(count) / samples - model);
      covered += model;
    }
    report.offspring_tv = std::min(1.0, 0.5 * (diff_sum + std::max(0.0, 1.0 - covered)));
    report.same_count_p_value = chi_square_poisson(same_counts, ms).p_value;
  }
  return report;
}

namespace {

double log_binom_pmf(std::size_t k, std::size_t m, double p) {
  const double kd = static_cast<double>(k), md = static_cast<double>(m);
  return std::lgamma(md + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(md - kd + 1.0) +
         kd * std::log(p) + (md - kd) * std::log1p(-p);
}

}  // namespace

double binom_pois_tv(std::size_t m, std::size_t n, double c) {
  if (m == 0 || n == 0) throw std::invalid_argument("m and n must be positive");
  if (!(c >= 0.0) || c / static_cast<double>(n) > 1.0) throw std::invalid_argument("need c/n in [0,1]");
  if (c == 0.0) return 0.0;
  const double p = c / static_cast<double>(n);
  auto binom = [&](std::size_t k) -> double {
    if (k > m) return 0.0;
    if (p == 1.0) return k == m ? 1.0 : 0.0;
    return std::exp(log_binom_pmf(k, m, p));
  };
  const double binom_mean = static_cast<double>(m) * p;
  const double top_mean = std::max(c, binom_mean);
  // Past both means, pmfs decrease; stop once both remaining tails are tiny.
  const auto start_tail =
      static_cast<std::size_t>(top_mean + 10.0 * std::sqrt(top_mean) + 10.0);
  CompensatedSum abs_diff, binom_mass, pois_mass;
  for (std::size_t k = 0;; ++k) {
    const double bk = binom(k), pk = poisson_pmf(k, c);
    abs_diff.add(std::abs(bk - pk));
    binom_mass.add(bk);
    pois_mass.add(pk);
    if (k >= start_tail) {
      const double binom_tail = std::max(0.0, 1.0 - binom_mass.value());
      const double pois_tail = std::max(0.0, 1.0 - pois_mass.value());
      if ((binom_tail < 1e-12 && pois_tail < 1e-12) || (bk == 0.0 && pk == 0.0)) {
        return std::min(1.0, 0.5 * (abs_diff.value() + binom_tail + pois_tail));
      }
    }
  }
}

double hodges_le_cam_bound(std::size_t m, std::size_t n, double c) {
  const double nd = static_cast<double>(n);
  return c * c * static_cast<double>(m) / (nd * nd);
}

}  // namespace sbm
