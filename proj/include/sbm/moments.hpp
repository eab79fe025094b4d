#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sbm/graph.hpp"
#include "sbm/rng.hpp"

namespace sbm {

/// Case table for the per-pair likelihood ratio W_uv between the planted
/// model and its Erdos-Renyi null at matching mean degree.
struct EdgeWeightSpec {
  double a = 0.0;
  double b = 0.0;
  std::size_t n = 0;

  double present_same() const { return 2.0 * a / (a + b); }
  double present_diff() const { return 2.0 * b / (a + b); }
  double absent_same() const { return (n - a) / (n - (a + b) / 2.0); }
  double absent_diff() const { return (n - b) / (n - (a + b) / 2.0); }
  double null_edge_probability() const { return (a + b) / (2.0 * n); }
};

/// Requires n > (a+b)/2.
double edge_weight(bool present, bool same_label, double a, double b, std::size_t n);

/// E[W_uv] over null edge presence for fixed labels (exactly 1 in theory).
double expected_edge_weight(bool same_label, double a, double b, std::size_t n);

/// Y(G) = 2^{-n} sum over all labelings of prod over all unordered pairs of
/// W_uv. Labelings are enumerated in Gray-code order while tracking the
/// number of same-label edges; terms are grouped by (plus count, same-label
/// edge count) so each log-weight is formed exactly once and the sum is
/// compensated. n <= 24.
double exact_Y(const SimpleGraph& g, double a, double b);

inline constexpr std::size_t kMaxExactYVertices = 24;

/// e^{-t/2 - t^2/4} / sqrt(1 - t), for 0 <= t < 1.
double second_moment_limit(double t);

/// Exact E[W_uv V_uv] over null edge presence, where sigma_same says whether
/// sigma_u = sigma_v and tau_same whether tau_u = tau_v.
double cross_moment(bool sigma_same, bool tau_same, double a, double b, std::size_t n);

enum class PairAgreement { agree, disagree };  // sign of sigma_u sigma_v tau_u tau_v

/// The value depends only on the sign of sigma_u sigma_v tau_u tau_v, so
/// agree is evaluated as (same, same) and disagree as (same, different).
double cross_moment(PairAgreement agreement, double a, double b, std::size_t n);

/// 1 +/- (t/n + (a-b)^2/(4n^2)): the expansion up to O(n^-3).
double cross_moment_expansion(PairAgreement agreement, double a, double b, std::size_t n);

/// E exp(s Z_n^2 / 2), Z_n = n^{-1/2} (sum of n iid signs), summed exactly over
/// the n+1 outcomes. Requires s < 1 and n <= 10^6.
double mgf_binomial(std::size_t n, double s);

/// sum over labelings of V(h) of prod over edges of 2a/(a+b) (agreeing ends)
/// or 2b/(a+b) (disagreeing ends). |V(h)| <= 24.
double cycle_weight_sum(const SimpleGraph& h, double a, double b);

/// sum_{k=3}^{k_max} t^k / (2k); equals sum lambda_k delta_k^2.
double subgraph_series_partial(double t, int k_max);

/// -(1/2)(log(1-t) + t + t^2/2), the limit of the series above.
double subgraph_series_closed_form(double t);

/// (1/2k) ((a+b)/2)^k and ((a-b)/(a+b))^k.
double cycle_lambda(double a, double b, int k);
double cycle_delta(double a, double b, int k);

/// Exact E[Y^2] under G(n, (a+b)/(2n)) at finite n, summing the cross
/// moments over label-pair configurations grouped by the four class sizes.
double exact_second_moment(double a, double b, std::size_t n);

/// rho(sigma, tau) = (1/n) sum sigma_i tau_i.
double overlap(std::span<const Label> sigma, std::span<const Label> tau);

struct MomentReport {
  std::size_t n = 0;
  double a = 0.0;
  double b = 0.0;
  int k = 0;
  std::size_t trials = 0;
  double t = 0.0;
  double mean_y = 0.0;
  double se_mean_y = 0.0;
  double mean_y2 = 0.0;
  double se_mean_y2 = 0.0;
  double exact_y2 = 0.0;         // finite-n exact E[Y^2]
  double limit_y2 = 0.0;         // e^{-t/2-t^2/4}/sqrt(1-t), NaN if t >= 1
  double lambda_k = 0.0;         // limiting null cycle mean
  double lambda_k_n = 0.0;       // finite-n null cycle mean
  double delta_k = 0.0;
  double predicted_yx = 0.0;     // lambda_k_n (1 + delta_k)
  double mean_yx = 0.0;          // E[Y X_k]
  double se_mean_yx = 0.0;
  double mean_x = 0.0;
  double ratio = 0.0;            // E[Y X_k] / predicted_yx
  double se_ratio = 0.0;
  double normalized_ratio = 0.0; // (E[Y X_k] / E[Y]) / predicted_yx
  double se_normalized_ratio = 0.0;
  std::vector<double> y_samples;
};

/// Monte Carlo over null graphs with exact Y per graph. Trial i uses
/// rng.split(i).
MomentReport conditioned_moment_check(double a, double b, std::size_t n, int k,
                                      std::size_t trials, const RngStream& rng,
                                      unsigned threads = 0);

}  // namespace sbm
