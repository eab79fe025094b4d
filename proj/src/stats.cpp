#include "sbm/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbm {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    compensation_ += (sum_ - t) + x;
  else
    compensation_ += (x - t) + sum_;
  sum_ = t;
}

SampleSummary summarize(std::span<const double> values) {
  SampleSummary s;
  s.count = values.size();
  if (s.count == 0) return s;
  CompensatedSum total;
  for (double v : values) total.add(v);
  s.mean = total.value() / static_cast<double>(s.count);
  if (s.count < 2) return s;
  CompensatedSum m2, m4;
  for (double v : values) {
    const double dev = v - s.mean;
    m2.add(dev * dev);
    m4.add(dev * dev * dev * dev);
  }
  const double n = static_cast<double>(s.count);
  s.variance = m2.value() / (n - 1.0);
  s.stderr_mean = std::sqrt(s.variance / n);
  const double central2 = m2.value() / n;
  const double central4 = m4.value() / n;
  s.stderr_variance = std::sqrt(std::max(0.0, central4 - central2 * central2) / n);
  return s;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  const double lo = values[mid - 1], hi = values[mid];
  if (std::isinf(lo) || std::isinf(hi)) return hi;
  return 0.5 * (lo + hi);
}

double bootstrap_median_se(std::span<const double> values, std::size_t resamples, RngStream rng) {
  if (values.size() < 2 || resamples < 2) return 0.0;
  std::vector<double> medians;
  medians.reserve(resamples);
  std::vector<double> sample(values.size());
  for (std::size_t r = 0; r < resamples; ++r) {
    for (auto& x : sample) x = values[rng.uniform_int(values.size())];
    const double m = median(sample);
    if (std::isfinite(m)) medians.push_back(m);
  }
  if (medians.size() < 2) return std::numeric_limits<double>::infinity();
  return std::sqrt(summarize(medians).variance);
}

double poisson_pmf(std::uint64_t k, double mean) {
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
}

double chi_square_sf(double statistic, int degrees_of_freedom) {
  if (degrees_of_freedom <= 0) return 1.0;
  boost::math::chi_squared dist(degrees_of_freedom);
  return boost::math::cdf(boost::math::complement(dist, std::max(0.0, statistic)));
}

ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> observations, double mean) {
  ChiSquareResult result;
  const double total = static_cast<double>(observations.size());
  if (observations.empty()) return result;
  const std::uint64_t top = *std::max_element(observations.begin(), observations.end());
  // Cells 0..K where K covers both the data and the bulk of the Poisson mass.
  const std::uint64_t cells =
      std::max<std::uint64_t>(top, static_cast<std::uint64_t>(mean + 10.0 * std::sqrt(mean) + 10)) + 1;
  std::vector<double> observed(cells, 0.0), expected(cells, 0.0);
  for (auto x : observations) observed[x] += 1.0;
  double mass = 0.0;
  for (std::uint64_t k = 0; k < cells; ++k) {
    expected[k] = total * poisson_pmf(k, mean);
    mass += expected[k];
  }
  expected[cells - 1] += std::max(0.0, total - mass);  // upper tail

  // Merge from the left and from the right until expectations reach 5.
  std::vector<double> obs_bins, exp_bins;
  double o = 0.0, e = 0.0;
  for (std::uint64_t k = 0; k < cells; ++k) {
    o += observed[k];
    e += expected[k];
    if (e >= 5.0) {
      obs_bins.push_back(o);
      exp_bins.push_back(e);
      o = e = 0.0;
    }
  }
  if (!obs_bins.empty()) {
    obs_bins.back() += o;
    exp_bins.back() += e;
  } else {
    obs_bins.push_back(o);
    exp_bins.push_back(e);
  }
  for (std::size_t i = 0; i < obs_bins.size(); ++i) {
    if (exp_bins[i] <= 0.0) continue;
    const double diff = obs_bins[i] - exp_bins[i];
    result.statistic += diff * diff / exp_bins[i];
  }
  // one degree lost to the total count; the mean is predicted, not fitted
  result.degrees_of_freedom = static_cast<int>(obs_bins.size()) - 1;
  result.p_value = chi_square_sf(result.statistic, result.degrees_of_freedom);
  return result;
}

}  // namespace sbm
