#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sbm/graph.hpp"
#include "sbm/rng.hpp"

namespace sbm {

/// Rooted tree produced by the two-type Poisson broadcast process, stored in
/// breadth-first order: vertex 0 is the root, every level is a contiguous id
/// range and the children of a vertex are contiguous.
struct BroadcastTree {
  std::vector<std::int64_t> parent;        // -1 for the root
  std::vector<std::size_t> first_child;
  std::vector<std::uint32_t> same_count;   // children sharing the parent's label
  std::vector<std::uint32_t> diff_count;   // children with the opposite label
  std::vector<Label> label;
  std::vector<int> depth;
  std::vector<std::size_t> level_offsets;  // level r is [level_offsets[r], level_offsets[r+1])
  int max_depth = 0;

  std::size_t size() const { return label.size(); }
  std::size_t num_children(std::size_t v) const { return same_count[v] + diff_count[v]; }
  std::size_t level_begin(int r) const { return level_offsets[r]; }
  std::size_t level_end(int r) const { return level_offsets[r + 1]; }
  std::size_t level_size(int r) const { return level_end(r) - level_begin(r); }
  /// Labels of the vertices at depth r, in id order.
  std::span<const Label> level_labels(int r) const {
    return {label.data() + level_begin(r), level_size(r)};
  }
};

enum class OffspringLaw {
  /// Pois(a/2) same-label and Pois(b/2) opposite-label children: mean degree
  /// (a+b)/2, matching neighbourhoods of the planted graph.
  half_rates,
  /// Pois(a) and Pois(b): mean (a+b), flip probability still b/(a+b).
  full_rates,
};

inline constexpr std::size_t kDefaultTreeBudget = 20'000'000;

/// Root label uniform; each vertex above depth R spawns its offspring split.
/// Throws BudgetExceeded past `node_budget` vertices.
BroadcastTree sample_broadcast(double a, double b, int depth, RngStream& rng,
                               OffspringLaw law = OffspringLaw::half_rates,
                               std::size_t node_budget = kDefaultTreeBudget);

/// Throws std::logic_error if labels, tallies and levels disagree.
void check_invariants(const BroadcastTree& tree);

/// P(root = +1 | labels at depth R) under a uniform root prior, by exact
/// leaf-to-root message passing on log-likelihood ratios. `observed` lists the
/// depth-R labels in id order. Vertices above depth R without children carry
/// no information. Requires 0 < epsilon < 1.
double root_posterior(const BroadcastTree& tree, int depth, std::span<const Label> observed,
                      double epsilon);

/// Uses the true labels at the tree's own max depth.
double root_posterior(const BroadcastTree& tree, double epsilon);

struct ThresholdQuery {
  double d = 0.0;        // mean offspring
  double epsilon = 0.0;  // flip probability in [0, 1/2]

  static ThresholdQuery from_planted(double a, double b);
  double theta() const { return 1.0 - 2.0 * epsilon; }
  double ks_value() const { return d * theta() * theta(); }
};

enum class Reconstructability { reconstructable, non_reconstructable };

std::string to_string(Reconstructability r);

/// Non-reconstructable iff d (1 - 2 eps)^2 <= 1.
Reconstructability ks_check(const ThresholdQuery& query);

struct CurvePoint {
  int depth = 0;
  double mean_abs_bias = 0.0;  // E |P(root=+ | leaves) - 1/2|
  double stderr = 0.0;
};

struct ReconstructionCurve {
  double a = 0.0;
  double b = 0.0;
  double d = 0.0;
  double theta = 0.0;
  double ks_value = 0.0;
  std::size_t trials = 0;
  std::vector<CurvePoint> points;  // depth 0..R_max
};

/// Trial i draws one tree of depth R_max from rng.split(i) and evaluates the
/// posterior from its true labels at every depth R <= R_max.
ReconstructionCurve reconstruction_curve(double a, double b, int max_depth, std::size_t trials,
                                         const RngStream& rng, unsigned threads = 0,
                                         OffspringLaw law = OffspringLaw::half_rates);

}  // namespace sbm
