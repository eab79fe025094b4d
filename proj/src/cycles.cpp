#include "sbm/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbm/errors.hpp"
#include "sbm/parallel.hpp"
#include "sbm/stats.hpp"

namespace sbm {

std::string to_string(CensusMethod method) {
  return method == CensusMethod::exact ? "exact" : "nb_walk";
}

std::string to_string(GraphModel model) { return model == GraphModel::sbm ? "sbm" : "er"; }

std::uint64_t CycleCensus::count(int k) const {
  auto it = counts.find(k);
  return it == counts.end() ? 0 : it->second;
}

double CycleCensus::flagged_fraction() const {
  return num_vertices == 0 ? 0.0
                           : static_cast<double>(flagged.size()) / static_cast<double>(num_vertices);
}

PoissonPrediction PoissonPrediction::compute(double a, double b, int k) {
  PoissonPrediction p;
  p.k = k;
  p.mean_sbm = (std::pow(a + b, k) + std::pow(a - b, k)) / (k * std::pow(2.0, k + 1));
  p.mean_er = std::pow((a + b) / 2.0, k) / (2.0 * k);
  p.delta_k = std::pow((a - b) / (a + b), k);
  return p;
}

namespace {

// n (n-1) ... (n-k+1) / n^k
double falling_ratio(std::size_t n, int k) {
  double r = 1.0;
  const double nd = static_cast<double>(n);
  for (int i = 0; i < k; ++i) r *= (nd - i) / nd;
  return std::max(0.0, r);
}

}  // namespace

double planted_cycle_mean(std::size_t n, double a, double b, int k) {
  if (k < 3 || static_cast<std::size_t>(k) > n) return 0.0;
  return falling_ratio(n, k) / (2.0 * k) *
         (std::pow((a + b) / 2.0, k) + std::pow((a - b) / 2.0, k));
}

double er_cycle_mean(std::size_t n, double c, int k) {
  if (k < 3 || static_cast<std::size_t>(k) > n) return 0.0;
  return falling_ratio(n, k) / (2.0 * k) * std::pow(c, k);
}

// ---------------------------------------------------------------------------
// Exact enumeration

namespace {

class CycleSearch {
 public:
  CycleSearch(const SimpleGraph& g, int k_max, std::uint64_t budget)
      : g_(g), k_max_(k_max), budget_(budget), on_path_(g.num_vertices(), 0),
        counts_(static_cast<std::size_t>(k_max) + 1, 0) {}

  std::vector<std::uint64_t> run() {
    for (VertexId s = 0; s < g_.num_vertices(); ++s) {
      root_ = s;
      path_.assign(1, s);
      on_path_[s] = 1;
      extend(s);
      on_path_[s] = 0;
    }
    return counts_;
  }

 private:
  void extend(VertexId x) {
    const int len = static_cast<int>(path_.size());
    for (VertexId w : g_.neighbors(x)) {
      if (w == root_) {
        if (len >= 3 && path_[1] < x) ++counts_[len];
        continue;
      }
      if (w < root_ || on_path_[w] || len >= k_max_) continue;
      if (++expanded_ > budget_)
        throw BudgetExceeded("exact cycle enumeration exceeded " + std::to_string(budget_) +
                             " search nodes");
      path_.push_back(w);
      on_path_[w] = 1;
      extend(w);
      on_path_[w] = 0;
      path_.pop_back();
    }
  }

  const SimpleGraph& g_;
  int k_max_;
  std::uint64_t budget_;
  std::uint64_t expanded_ = 0;
  VertexId root_ = 0;
  std::vector<VertexId> path_;
  std::vector<char> on_path_;
  std::vector<std::uint64_t> counts_;
};

}  // namespace

CycleCensus count_cycles_exact(const SimpleGraph& g, int k_max, std::uint64_t node_budget) {
  if (k_max < 3) throw std::invalid_argument("k_max must be at least 3");
  CycleCensus census;
  census.method = CensusMethod::exact;
  census.num_vertices = g.num_vertices();
  const auto counts = CycleSearch(g, k_max, node_budget).run();
  for (int k = 3; k <= k_max; ++k) census.counts[k] = counts[k];
  return census;
}

// ---------------------------------------------------------------------------
// Non-backtracking walks on balls

namespace {

std::uint64_t checked_add(std::uint64_t x, std::uint64_t y) {
  std::uint64_t r;
  if (__builtin_add_overflow(x, y, &r)) throw std::overflow_error("walk count overflow");
  return r;
}

std::int64_t checked_mul_sub(std::int64_t acc, std::int64_t x, std::int64_t y) {
  std::int64_t prod, r;
  if (__builtin_mul_overflow(x, y, &prod) || __builtin_sub_overflow(acc, prod, &r))
    throw std::overflow_error("walk count overflow");
  return r;
}

// Reusable BFS state; one per worker.
class BallWorkspace {
 public:
  explicit BallWorkspace(const SimpleGraph& g) : g_(g), stamp_(g.num_vertices(), 0),
                                                 local_(g.num_vertices(), 0) {}

  // BFS from v to radius r. Vertices land in `order` sorted by distance.
  void grow(VertexId v, int r) {
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    order.clear();
    dist.clear();
    visit(v, 0);
    for (std::size_t head = 0; head < order.size(); ++head) {
      if (dist[head] == r) continue;
      for (VertexId w : g_.neighbors(order[head]))
        if (stamp_[w] != epoch_) visit(w, dist[head] + 1);
    }
  }

  bool inside(VertexId w) const { return stamp_[w] == epoch_; }
  std::uint32_t local(VertexId w) const { return local_[w]; }

  // Edges of the induced ball.
  std::size_t edge_count() const {
    std::size_t e = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
      for (VertexId w : g_.neighbors(order[i]))
        if (inside(w) && local_[w] > i) ++e;
    return e;
  }

  // Local CSR on the first `prefix` vertices of `order` (those are exactly the
  // vertices within some radius, since BFS order is sorted by distance).
  void build_local(std::size_t prefix) {
    offsets.assign(prefix + 1, 0);
    targets.clear();
    sources.clear();
    for (std::size_t i = 0; i < prefix; ++i) {
      for (VertexId w : g_.neighbors(order[i])) {
        if (inside(w) && local_[w] < prefix) {
          targets.push_back(local_[w]);
          sources.push_back(static_cast<std::uint32_t>(i));
        }
      }
      offsets[i + 1] = targets.size();
    }
    reverse.assign(targets.size(), 0);
    for (std::size_t e = 0; e < targets.size(); ++e) {
      const std::uint32_t from = sources[e], to = targets[e];
      for (std::size_t f = offsets[to]; f < offsets[to + 1]; ++f)
        if (targets[f] == from) {
          reverse[e] = f;
          break;
        }
    }
  }

  std::vector<VertexId> order;
  std::vector<int> dist;
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> targets, sources;
  std::vector<std::size_t> reverse;

 private:
  void visit(VertexId w, int d) {
    stamp_[w] = epoch_;
    local_[w] = static_cast<std::uint32_t>(order.size());
    order.push_back(w);
    dist.push_back(d);
  }

  const SimpleGraph& g_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> local_;
  std::uint32_t epoch_ = 0;
};

std::size_t prefix_within(const std::vector<int>& dist, int radius) {
  return static_cast<std::size_t>(
      std::upper_bound(dist.begin(), dist.end(), radius) - dist.begin());
}

// Row recursion r_j = e_v^T A_j on the local graph built in `ws`.
std::int64_t vertex_recursion(const BallWorkspace& ws, int k, NbRecurrence recurrence) {
  const std::size_t n = ws.offsets.size() - 1;
  auto degree = [&](std::size_t x) {
    return static_cast<std::int64_t>(ws.offsets[x + 1] - ws.offsets[x]);
  };
  std::vector<std::int64_t> prev2(n, 0), prev(n, 0), next(n, 0);
  prev2[0] = 1;  // r_0 = e_v
  for (std::size_t e = ws.offsets[0]; e < ws.offsets[1]; ++e) prev[ws.targets[e]] = 1;  // r_1
  if (k == 1) return prev[0];
  for (int j = 2; j <= k; ++j) {
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t x = 0; x < n; ++x) {
      if (prev[x] == 0) continue;
      for (std::size_t e = ws.offsets[x]; e < ws.offsets[x + 1]; ++e) {
        std::int64_t& slot = next[ws.targets[e]];
        if (__builtin_add_overflow(slot, prev[x], &slot))
          throw std::overflow_error("walk count overflow");
      }
    }
    for (std::size_t x = 0; x < n; ++x) {
      std::int64_t weight;
      if (recurrence == NbRecurrence::uniform_degree)
        weight = degree(0);  // row v of D A_{j-2} is D_vv times row v of A_{j-2}
      else
        weight = j == 2 ? degree(x) : degree(x) - 1;
      next[x] = checked_mul_sub(next[x], prev2[x], weight);
    }
    std::swap(prev2, prev);
    std::swap(prev, next);
  }
  return prev[0];
}

// Cyclically reduced closed walks of length m at local vertex 0, propagated on
// directed edges: after each step, the count on edge (y -> z) is the number of
// walks arriving at y by any edge other than (z -> y).
std::uint64_t cyclic_walks(const BallWorkspace& ws, int m, std::vector<std::uint64_t>& cur,
                           std::vector<std::uint64_t>& next, std::vector<std::uint64_t>& in) {
  const std::size_t n = ws.offsets.size() - 1;
  const std::size_t arcs = ws.targets.size();
  std::uint64_t total = 0;
  for (std::size_t first = ws.offsets[0]; first < ws.offsets[1]; ++first) {
    cur.assign(arcs, 0);
    cur[first] = 1;
    for (int step = 2; step <= m; ++step) {
      in.assign(n, 0);
      for (std::size_t e = 0; e < arcs; ++e)
        if (cur[e]) in[ws.targets[e]] = checked_add(in[ws.targets[e]], cur[e]);
      next.assign(arcs, 0);
      for (std::size_t y = 0; y < n; ++y) {
        if (!in[y]) continue;
        for (std::size_t e = ws.offsets[y]; e < ws.offsets[y + 1]; ++e)
          next[e] = in[y] - cur[ws.reverse[e]];
      }
      std::swap(cur, next);
    }
    // arcs into vertex 0 are the reverses of arcs out of it
    for (std::size_t out = ws.offsets[0]; out < ws.offsets[1]; ++out)
      if (out != first) total = checked_add(total, cur[ws.reverse[out]]);
  }
  return total;
}

std::vector<int> divisor_lengths(int k) {
  std::vector<int> lengths;
  for (int m = 3; m <= k; ++m)
    if (k % m == 0) lengths.push_back(m);
  return lengths;
}

}  // namespace

std::int64_t closed_nb_walks(const SimpleGraph& g, VertexId v, int k, NbRecurrence recurrence) {
  if (k < 1) throw std::invalid_argument("walk length must be positive");
  if (v >= g.num_vertices()) throw std::out_of_range("vertex out of range");
  BallWorkspace ws(g);
  const int radius = recurrence == NbRecurrence::uniform_degree ? k : (k + 1) / 2;
  ws.grow(v, radius);
  ws.build_local(ws.order.size());
  return vertex_recursion(ws, k, recurrence);
}

std::int64_t closed_nb_walk_total(const SimpleGraph& g, int k, NbRecurrence recurrence) {
  if (k < 1) throw std::invalid_argument("walk length must be positive");
  BallWorkspace ws(g);
  const int radius = recurrence == NbRecurrence::uniform_degree ? k : (k + 1) / 2;
  std::int64_t total = 0;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    ws.grow(v, radius);
    ws.build_local(ws.order.size());
    if (__builtin_add_overflow(total, vertex_recursion(ws, k, recurrence), &total))
      throw std::overflow_error("walk count overflow");
  }
  return total;
}

std::uint64_t cyclic_nb_walks(const SimpleGraph& g, VertexId v, int k) {
  if (k < 3) throw std::invalid_argument("k must be at least 3");
  if (v >= g.num_vertices()) throw std::out_of_range("vertex out of range");
  BallWorkspace ws(g);
  ws.grow(v, k / 2);
  ws.build_local(ws.order.size());
  std::vector<std::uint64_t> cur, next, in;
  return cyclic_walks(ws, k, cur, next, in);
}

CycleCensus count_cycles_nb(const SimpleGraph& g, int k, unsigned threads) {
  if (k < 3) throw std::invalid_argument("k must be at least 3");
  const std::size_t n = g.num_vertices();
  const auto lengths = divisor_lengths(k);
  const int flag_radius = (k + 1) / 2;
  const int walk_radius = k / 2;

  struct Partial {
    std::vector<std::uint64_t> totals;
    std::vector<VertexId> flagged;
  };
  constexpr std::size_t kChunks = 64;
  const std::size_t chunk = (n + kChunks - 1) / kChunks;
  auto partials = parallel_map(kChunks, threads, [&](std::size_t c) {
    Partial p;
    p.totals.assign(lengths.size(), 0);
    const std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) return p;
    BallWorkspace ws(g);
    std::vector<std::uint64_t> cur, next, in;
    for (std::size_t v = lo; v < hi; ++v) {
      ws.grow(static_cast<VertexId>(v), flag_radius);
      if (ws.edge_count() >= ws.order.size() + 1) p.flagged.push_back(static_cast<VertexId>(v));
      ws.build_local(prefix_within(ws.dist, walk_radius));
      for (std::size_t i = 0; i < lengths.size(); ++i)
        p.totals[i] = checked_add(p.totals[i], cyclic_walks(ws, lengths[i], cur, next, in));
    }
    return p;
  });

  CycleCensus census;
  census.method = CensusMethod::nb_walk;
  census.num_vertices = n;
  std::vector<std::uint64_t> walks(lengths.size(), 0);
  for (auto& p : partials) {
    for (std::size_t i = 0; i < lengths.size(); ++i) walks[i] = checked_add(walks[i], p.totals[i]);
    census.flagged.insert(census.flagged.end(), p.flagged.begin(), p.flagged.end());
  }
  // Walk totals: N_m = sum_{j | m} 2 j X_j. Peel off the shorter divisors.
  std::map<int, std::uint64_t> cycles;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const int m = lengths[i];
    long double remainder = static_cast<long double>(walks[i]);
    for (const auto& [j, x] : cycles)
      if (m % j == 0) remainder -= 2.0L * j * static_cast<long double>(x);
    cycles[m] = remainder <= 0 ? 0 : static_cast<std::uint64_t>(remainder / (2.0L * m));
  }
  census.counts[k] = cycles[k];
  return census;
}

// ---------------------------------------------------------------------------

PoissonCheckReport poisson_law_check(const ModelParams& params, GraphModel model, int k,
                                     std::size_t trials, const RngStream& rng,
                                     CensusMethod method, unsigned threads) {
  params.validate();
  if (k < 3) throw std::invalid_argument("k must be at least 3");
  if (trials < 100) throw std::invalid_argument("poisson_law_check needs at least 100 trials");

  struct Trial {
    std::uint64_t x = 0;
    std::uint8_t flagged = 0;
  };
  auto results = parallel_map(trials, threads, [&](std::size_t i) {
    RngStream stream = rng.split(i);
    const LabeledGraph g = model == GraphModel::sbm
                               ? sample_sbm(params, stream)
                               : sample_er(params.n, params.null_intensity(), stream);
    Trial t;
    if (method == CensusMethod::exact) {
      t.x = count_cycles_exact(g.graph(), k).count(k);
    } else {
      const auto census = count_cycles_nb(g.graph(), k, 1);
      t.x = census.count(k);
      t.flagged = census.approximate() ? 1 : 0;
    }
    return t;
  });

  PoissonCheckReport report;
  report.model = model;
  report.params = params;
  report.k = k;
  report.trials = trials;
  report.method = method;
  std::vector<double> xs;
  std::size_t flagged = 0;
  for (const auto& t : results) {
    report.samples.push_back(t.x);
    xs.push_back(static_cast<double>(t.x));
    flagged += t.flagged;
  }
  const auto summary = summarize(xs);
  const auto prediction = PoissonPrediction::compute(params.a, params.b, k);
  report.emp_mean = summary.mean;
  report.emp_var = summary.variance;
  report.se_mean = summary.stderr_mean;
  report.se_var = summary.stderr_variance;
  report.pred_mean = model == GraphModel::sbm ? prediction.mean_sbm : prediction.mean_er;
  report.finite_n_mean = model == GraphModel::sbm
                             ? planted_cycle_mean(params.n, params.a, params.b, k)
                             : er_cycle_mean(params.n, params.null_intensity(), k);
  report.flagged_fraction = static_cast<double>(flagged) / static_cast<double>(trials);
  const auto gof = chi_square_poisson(report.samples, report.pred_mean);
  report.chi_square = gof.statistic;
  report.chi_square_dof = gof.degrees_of_freedom;
  report.chi_square_p = gof.p_value;
  report.pass = std::abs(report.emp_mean - report.pred_mean) <= 4.0 * report.se_mean &&
                std::abs(report.emp_var - report.pred_mean) <= 4.0 * report.se_var;
  return report;
}

}  // namespace sbm
