#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sbm/graph.hpp"
#include "sbm/rng.hpp"

namespace sbm {

enum class CensusMethod { exact, nb_walk };

std::string to_string(CensusMethod method);

/// Counts X_k of k-cycles for k in [k_min, k_max].
struct CycleCensus {
  CensusMethod method = CensusMethod::exact;
  std::size_t num_vertices = 0;
  std::map<int, std::uint64_t> counts;
  /// NB method only: vertices whose ball holds two or more independent cycles.
  std::vector<VertexId> flagged;

  std::uint64_t count(int k) const;
  bool approximate() const { return !flagged.empty(); }
  double flagged_fraction() const;
};

/// Limiting Poisson means of X_k under the planted model and the ER null.
struct PoissonPrediction {
  int k = 0;
  double mean_sbm = 0.0;  // ((a+b)^k + (a-b)^k) / (k 2^{k+1})
  double mean_er = 0.0;   // ((a+b)/2)^k / (2k)
  double delta_k = 0.0;   // ((a-b)/(a+b))^k

  static PoissonPrediction compute(double a, double b, int k);
};

/// Exact finite-n expectation of X_k under the planted model:
/// C(n,k) (k-1)!/2 (2n)^{-k} ((a+b)^k + (a-b)^k).
double planted_cycle_mean(std::size_t n, double a, double b, int k);

/// Exact finite-n expectation of X_k under G(n, c/n).
double er_cycle_mean(std::size_t n, double c, int k);

inline constexpr std::uint64_t kDefaultCycleBudget = 2'000'000'000ULL;

/// Counts every simple cycle of length 3..k_max once. Depth-first search from
/// each root through larger vertices only; direction fixed by requiring the
/// second vertex to be smaller than the last. Throws BudgetExceeded when more
/// than `node_budget` search nodes are expanded.
CycleCensus count_cycles_exact(const SimpleGraph& g, int k_max,
                               std::uint64_t node_budget = kDefaultCycleBudget);

enum class NbRecurrence {
  /// A_2 = A^2 - D, A_j = A_{j-1} A - A_{j-2} (D - I), ball radius ceil(k/2).
  standard,
  /// A_j = A_{j-1} A - D A_{j-2} for all j >= 2, ball radius k.
  uniform_degree,
};

/// (v, v) entry of the k-th non-backtracking walk matrix of the ball around v.
/// Includes walks with a tail (out along a path, around a cycle, back).
/// Throws std::overflow_error if a count leaves the int64 range.
std::int64_t closed_nb_walks(const SimpleGraph& g, VertexId v, int k,
                             NbRecurrence recurrence = NbRecurrence::standard);

/// Sum over v of closed_nb_walks(g, v, k, recurrence).
std::int64_t closed_nb_walk_total(const SimpleGraph& g, int k, NbRecurrence recurrence);

/// Closed non-backtracking walks of length k at v whose last step is not the
/// reverse of the first (cyclically reduced walks). In a ball holding at most
/// one cycle these are exactly the traversals, in either direction, of the
/// cycles through v whose length divides k.
std::uint64_t cyclic_nb_walks(const SimpleGraph& g, VertexId v, int k);

/// Cycle count for length k via per-vertex non-backtracking walks on balls.
/// Exact whenever no vertex is flagged.
CycleCensus count_cycles_nb(const SimpleGraph& g, int k, unsigned threads = 1);

enum class GraphModel { sbm, er };

std::string to_string(GraphModel model);

struct PoissonCheckReport {
  GraphModel model = GraphModel::sbm;
  ModelParams params;
  int k = 0;
  std::size_t trials = 0;
  CensusMethod method = CensusMethod::nb_walk;
  double emp_mean = 0.0;
  double emp_var = 0.0;
  double se_mean = 0.0;
  double se_var = 0.0;
  double pred_mean = 0.0;        // limiting Poisson mean
  double finite_n_mean = 0.0;    // exact expectation at this n
  double flagged_fraction = 0.0; // fraction of trials with a flagged vertex
  double chi_square = 0.0;
  int chi_square_dof = 0;
  double chi_square_p = 1.0;
  bool pass = false;             // mean and variance each within 4 SE of pred_mean
  std::vector<std::uint64_t> samples;
};

/// Samples `trials` graphs (trial i uses rng.split(i)) and compares X_k with
/// its limiting Poisson law. Under GraphModel::er the null G(n, d/n) is used.
PoissonCheckReport poisson_law_check(const ModelParams& params, GraphModel model, int k,
                                     std::size_t trials, const RngStream& rng,
                                     CensusMethod method = CensusMethod::nb_walk,
                                     unsigned threads = 0);

}  // namespace sbm
