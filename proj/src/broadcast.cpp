#include "sbm/broadcast.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbm/errors.hpp"
#include "sbm/parallel.hpp"
#include "sbm/stats.hpp"

namespace sbm {

BroadcastTree sample_broadcast(double a, double b, int depth, RngStream& rng, OffspringLaw law,
                               std::size_t node_budget) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("a and b must be positive");
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  const double scale = law == OffspringLaw::half_rates ? 0.5 : 1.0;
  const double same_rate = scale * a, diff_rate = scale * b;

  BroadcastTree t;
  t.max_depth = depth;
  t.parent.push_back(-1);
  t.label.push_back(static_cast<Label>(rng.sign()));
  t.depth.push_back(0);
  t.level_offsets = {0, 1};
  for (int r = 0; r < depth; ++r) {
    const std::size_t begin = t.level_offsets[r], end = t.level_offsets[r + 1];
    for (std::size_t v = begin; v < end; ++v) {
      const auto same = static_cast<std::uint32_t>(rng.poisson(same_rate));
      const auto diff = static_cast<std::uint32_t>(rng.poisson(diff_rate));
      t.first_child.push_back(t.size());
      t.same_count.push_back(same);
      t.diff_count.push_back(diff);
      if (t.size() + same + diff > node_budget)
        throw BudgetExceeded("broadcast tree exceeded " + std::to_string(node_budget) +
                             " vertices");
      // same-label children first, then flipped ones
      for (std::uint32_t c = 0; c < same + diff; ++c) {
        t.parent.push_back(static_cast<std::int64_t>(v));
        t.label.push_back(static_cast<Label>(c < same ? t.label[v] : -t.label[v]));
        t.depth.push_back(r + 1);
      }
    }
    t.level_offsets.push_back(t.size());
  }
  // bottom level has no offspring
  for (std::size_t v = t.first_child.size(); v < t.size(); ++v) {
    t.first_child.push_back(t.size());
    t.same_count.push_back(0);
    t.diff_count.push_back(0);
  }
  return t;
}

void check_invariants(const BroadcastTree& t) {
  const std::size_t n = t.size();
  if (n == 0 || t.parent[0] != -1 || t.depth[0] != 0) throw std::logic_error("bad root");
  if (t.parent.size() != n || t.first_child.size() != n || t.same_count.size() != n ||
      t.diff_count.size() != n || t.depth.size() != n)
    throw std::logic_error("field length mismatch");
  if (t.level_offsets.size() != static_cast<std::size_t>(t.max_depth) + 2 ||
      t.level_offsets.back() != n)
    throw std::logic_error("level offsets");
  for (std::size_t v = 0; v < n; ++v) {
    if (t.depth[v] > t.max_depth) throw std::logic_error("vertex below max depth");
    std::uint32_t same = 0, diff = 0;
    for (std::size_t c = t.first_child[v]; c < t.first_child[v] + t.num_children(v); ++c) {
      if (t.parent[c] != static_cast<std::int64_t>(v) || t.depth[c] != t.depth[v] + 1)
        throw std::logic_error("child linkage");
      (t.label[c] == t.label[v] ? same : diff)++;
    }
    if (same != t.same_count[v] || diff != t.diff_count[v])
      throw std::logic_error("offspring tally disagrees with child labels");
  }
}

namespace {

// log(e^x + e^y) with infinities handled.
double log_add_exp(double x, double y) {
  if (x == -std::numeric_limits<double>::infinity()) return y;
  if (y == -std::numeric_limits<double>::infinity()) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

// Message from a child with log-likelihood ratio h through a binary symmetric
// channel: log [((1-e) L(+) + e L(-)) / (e L(+) + (1-e) L(-))].
double channel(double h, double log_keep, double log_flip) {
  if (h == std::numeric_limits<double>::infinity()) return log_keep - log_flip;
  if (h == -std::numeric_limits<double>::infinity()) return log_flip - log_keep;
  return log_add_exp(log_keep + h, log_flip) - log_add_exp(log_flip + h, log_keep);
}

}  // namespace

double root_posterior(const BroadcastTree& tree, int depth, std::span<const Label> observed,
                      double epsilon) {
  if (depth < 0 || depth > tree.max_depth) throw std::invalid_argument("depth outside tree");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0,1)");
  if (observed.size() != tree.level_size(depth))
    throw std::invalid_argument("observed labels must cover exactly the vertices at depth R (" +
                                std::to_string(tree.level_size(depth)) + "), got " +
                                std::to_string(observed.size()));
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double log_keep = std::log1p(-epsilon), log_flip = std::log(epsilon);

  std::vector<double> llr(tree.level_end(depth), 0.0);
  const std::size_t leaf0 = tree.level_begin(depth);
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (observed[i] != 1 && observed[i] != -1) throw std::invalid_argument("labels must be +/-1");
    llr[leaf0 + i] = observed[i] > 0 ? inf : -inf;
  }
  for (std::size_t v = leaf0; v-- > 0;) {
    double h = 0.0;
    for (std::size_t c = tree.first_child[v]; c < tree.first_child[v] + tree.num_children(v); ++c)
      h += channel(llr[c], log_keep, log_flip);
    llr[v] = h;
  }
  const double h = llr[0];
  if (h == inf) return 1.0;
  if (h == -inf) return 0.0;
  return h >= 0.0 ? 1.0 / (1.0 + std::exp(-h)) : std::exp(h) / (1.0 + std::exp(h));
}

double root_posterior(const BroadcastTree& tree, double epsilon) {
  return root_posterior(tree, tree.max_depth, tree.level_labels(tree.max_depth), epsilon);
}

ThresholdQuery ThresholdQuery::from_planted(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("a and b must be positive");
  return {(a + b) / 2.0, std::min(a, b) / (a + b)};
}

std::string to_string(Reconstructability r) {
  return r == Reconstructability::reconstructable ? "reconstructable" : "non-reconstructable";
}

Reconstructability ks_check(const ThresholdQuery& q) {
  if (!(q.d > 0.0)) throw std::invalid_argument("mean offspring must be positive");
  if (!(q.epsilon >= 0.0 && q.epsilon <= 0.5)) throw std::invalid_argument("epsilon in [0,1/2]");
  return q.ks_value() <= 1.0 ? Reconstructability::non_reconstructable
                             : Reconstructability::reconstructable;
}

ReconstructionCurve reconstruction_curve(double a, double b, int max_depth, std::size_t trials,
                                         const RngStream& rng, unsigned threads,
                                         OffspringLaw law) {
  if (max_depth < 0) throw std::invalid_argument("max depth must be nonnegative");
  if (trials < 500) throw std::invalid_argument("reconstruction_curve needs at least 500 trials");
  const double epsilon = b / (a + b);
  const auto rows = parallel_map(trials, threads, [&](std::size_t i) {
    RngStream stream = rng.split(i);
    const BroadcastTree tree = sample_broadcast(a, b, max_depth, stream, law);
    std::vector<double> bias(static_cast<std::size_t>(max_depth) + 1);
    for (int r = 0; r <= max_depth; ++r)
      bias[r] = std::abs(root_posterior(tree, r, tree.level_labels(r), epsilon) - 0.5);
    return bias;
  });

  ReconstructionCurve curve;
  curve.a = a;
  curve.b = b;
  const double scale = law == OffspringLaw::half_rates ? 0.5 : 1.0;
  curve.d = scale * (a + b);
  curve.theta = 1.0 - 2.0 * epsilon;
  curve.ks_value = curve.d * curve.theta * curve.theta;
  curve.trials = trials;
  std::vector<double> column(trials);
  for (int r = 0; r <= max_depth; ++r) {
    for (std::size_t i = 0; i < trials; ++i) column[i] = rows[i][r];
    const auto s = summarize(column);
    curve.points.push_back({r, s.mean, s.stderr_mean});
  }
  return curve;
}

}  // namespace sbm
