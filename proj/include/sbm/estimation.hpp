#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbm/cycles.hpp"
#include "sbm/graph.hpp"
#include "sbm/rng.hpp"

namespace sbm {

/// Cycle-count estimate of (a, b) from an unlabelled graph.
///
/// d_hat = 2|E|/n and f_hat = (2k X_k - d_hat^k)^{1/k}. When the radicand is
/// not positive, f_hat, a_hat and b_hat are left empty.
struct Estimate {
  std::size_t n = 0;
  std::size_t num_edges = 0;
  double d_hat = 0.0;
  std::optional<double> f_hat;
  std::optional<double> a_hat;
  std::optional<double> b_hat;
  int k_used = 0;
  std::uint64_t x_k = 0;
  double raw_statistic = 0.0;  // 2k X_k - d_hat^k
  CensusMethod method = CensusMethod::nb_walk;
  bool census_approximate = false;

  bool defined() const { return f_hat.has_value(); }
};

/// max(3, floor((ln n)^{1/4})).
int default_k(std::size_t n);

/// The estimator's arithmetic, given the edge count and X_k.
Estimate estimate_from_counts(std::size_t n, std::size_t num_edges, std::uint64_t x_k, int k);

/// Graphs with at most this many vertices are counted by exact enumeration.
inline constexpr std::size_t kExactCensusMaxVertices = 200;

/// Takes only the topology: labels never reach the estimator.
Estimate estimate_params(const SimpleGraph& g, std::optional<int> k = std::nullopt,
                         unsigned threads = 1);

/// Validation-only variant: averages 2k X_k - d_hat^k over many graphs before
/// taking the k-th root, which targets f^k without the per-graph root bias.
struct PooledEstimate {
  std::size_t trials = 0;
  int k = 0;
  double mean_raw = 0.0;
  double se_raw = 0.0;
  double mean_d_hat = 0.0;
  std::optional<double> f_hat;
  std::optional<double> a_hat;
  std::optional<double> b_hat;
};

PooledEstimate pool_estimates(std::span<const Estimate> estimates);

/// One estimate per sampled planted graph; trial i uses rng.split(i).
std::vector<Estimate> estimator_trials(const ModelParams& params, int k, std::size_t trials,
                                       const RngStream& rng, unsigned threads = 0);

struct ErrorProfile {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t undefined = 0;
  double median_abs_error = 0.0;  // |a_hat - a|; undefined estimates count as +inf
  double stderr_median = 0.0;     // bootstrap
};

ErrorProfile a_error_profile(std::span<const Estimate> estimates, double a,
                             const RngStream& bootstrap_rng);

// ---------------------------------------------------------------------------

class ContiguousRegimeError : public std::domain_error {
 public:
  explicit ContiguousRegimeError(const std::string& what) : std::domain_error(what) {}
};

enum class Decision { er_like, sbm_like };

std::string to_string(Decision decision);

struct DistinguishResult {
  int k = 0;
  std::uint64_t x_k = 0;
  double rho = 0.0;
  double mean_er = 0.0;    // (1/2k) ((a+b)/2)^k
  double threshold = 0.0;  // mean_er + rho^k
  Decision decision = Decision::er_like;
  double zscore = 0.0;     // (X_k - mean_er) / sqrt(mean_er)
};

/// Geometric mean of sqrt((a+b)/2) and (a-b)/2. Throws ContiguousRegimeError
/// unless (a-b)^2 > 2(a+b).
double distinguishing_rho(double a, double b);

/// Threshold test: planted-like iff X_k exceeds E'[X_k] + rho^k.
DistinguishResult distinguish(const SimpleGraph& g, double a, double b, int k,
                              unsigned threads = 1);

/// Distribution-level comparison of X_k under the planted model and the null.
struct MeanGapReport {
  ModelParams params;
  int k = 0;
  std::size_t trials = 0;  // per model
  double mean_sbm = 0.0;
  double mean_er = 0.0;
  double gap = 0.0;
  double se_gap = 0.0;
  double predicted_gap = 0.0;  // f^k / (2k)
  double z_power = 0.0;        // planted graphs with z-score > 3
  double z_size = 0.0;         // null graphs with z-score > 3
  bool pass = false;           // |gap - predicted_gap| <= 4 se_gap
};

/// Planted trial i uses rng.split(2i), null trial i uses rng.split(2i+1).
MeanGapReport mean_gap_study(const ModelParams& params, int k, std::size_t trials,
                             const RngStream& rng, unsigned threads = 0);

}  // namespace sbm
