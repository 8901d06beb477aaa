#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace aoi::stats {

/// Welford accumulator for mean/variance plus the raw second moment.
class RunningMoments {
 public:
  void add(double x);

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased
  double std_error() const;
  double second_moment() const { return sum_sq_ / static_cast<double>(count_); }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double sum_sq_ = 0.0;
};

/// Two-sided Student-t quantile for a (1 - alpha) interval.
double t_critical(std::size_t dof, double confidence = 0.95);

/// Ratio estimator sum(num)/sum(den) with a batch-means half-width.
struct RatioEstimate {
  double value = 0.0;
  double half_width = 0.0;
  std::size_t batches = 0;
};

/// Splits the paired observations into `batches` contiguous blocks (fewer
/// when there are not enough observations), takes each block's ratio, and
/// returns the pooled ratio with a t-based half-width over block ratios.
RatioEstimate batch_ratio(std::span<const double> numerators, std::span<const double> denominators,
                          std::size_t batches = 100, double confidence = 0.95);

/// Ordinary least squares y = intercept + slope * x.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Requires at least 4 points with non-constant x.
SlopeFit ols_fit(std::span<const double> x, std::span<const double> y);

}  // namespace aoi::stats
