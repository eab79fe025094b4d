#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sbm/rng.hpp"

namespace sbm {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;       // unbiased
  double stderr_mean = 0.0;    // sqrt(variance / count)
  double stderr_variance = 0.0;  // sqrt((m4 - m2^2) / count), large-sample
};

SampleSummary summarize(std::span<const double> values);

double median(std::vector<double> values);

/// Bootstrap standard error of the median with a seeded resampler.
double bootstrap_median_se(std::span<const double> values, std::size_t resamples, RngStream rng);

double poisson_pmf(std::uint64_t k, double mean);

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
};

/// Goodness of fit of integer observations to Pois(mean). Cells are merged
/// from the tails inward until every expected count is at least 5.
ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> observations, double mean);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, int degrees_of_freedom);

}  // namespace sbm
