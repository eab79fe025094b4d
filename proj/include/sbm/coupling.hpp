#pragma once

#include <cstddef>

#include "sbm/graph.hpp"
#include "sbm/rng.hpp"

namespace sbm {

/// Measurable consequences of the ball-to-tree coupling, accumulated over
/// (graph, uniform root) samples.
struct CouplingReport {
  ModelParams params;
  int radius = 0;
  std::size_t trials = 0;
  double tree_fraction = 0.0;
  /// Some vertex at distance r has two or more neighbours at distance r-1.
  double a_violation_rate = 0.0;
  /// Some edge joins two vertices at the same distance r >= 1.
  double b_violation_rate = 0.0;
  /// Some level s <= R has |boundary| > 2^s (a+b)^s log n.
  double c_violation_rate = 0.0;
  /// max over trials and s of |boundary_s| / (2^s (a+b)^s log n).
  double boundary_growth = 0.0;
  /// TV between the empirical (same, opposite) child-count law on the last
  /// interior level of tree-like balls and Pois(a/2) x Pois(b/2).
  double offspring_tv = 0.0;
  std::size_t offspring_samples = 0;
  /// Chi-square p-value of the same-label child counts against Pois(a/2).
  double same_count_p_value = 1.0;
  /// Largest | |V+| - |V-| | / n^{3/4} seen.
  double balance_statistic = 0.0;
  int asymptotic_radius = 0;
};

/// floor(log n / (10 log(2(a+b)))).
int asymptotic_radius(std::size_t n, double a, double b);

/// Trial i samples a planted graph and a uniform root from rng.split(i).
CouplingReport tree_likeness(const ModelParams& params, int radius, std::size_t trials,
                             const RngStream& rng, unsigned threads = 0);

/// Exact total-variation distance between Binom(m, c/n) and Pois(c), by
/// summation over a support truncated where both remaining tails are below
/// 1e-12 (the tails are added back, so the result is an upper bound within
/// that slack).
double binom_pois_tv(std::size_t m, std::size_t n, double c);

/// Hodges-Le Cam bound c^2 m / n^2 on || Binom(m, c/n) - Pois(mc/n) ||.
double hodges_le_cam_bound(std::size_t m, std::size_t n, double c);

}  // namespace sbm
