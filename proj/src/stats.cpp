#include "aoi/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace aoi::stats {

void RunningMoments::add(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
  sum_sq_ += x * x;
}

double RunningMoments::variance() const {
  return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
}

double RunningMoments::std_error() const {
  return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
}

double t_critical(std::size_t dof, double confidence) {
  if (dof == 0) throw std::invalid_argument("t_critical: need at least one degree of freedom");
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.5 + confidence / 2.0);
}

RatioEstimate batch_ratio(std::span<const double> numerators, std::span<const double> denominators,
                          std::size_t batches, double confidence) {
  if (numerators.size() != denominators.size()) {
    throw std::invalid_argument("batch_ratio: size mismatch");
  }
  const std::size_t n = numerators.size();
  if (n == 0) throw std::invalid_argument("batch_ratio: no observations");

  RatioEstimate out;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += numerators[i];
    den += denominators[i];
  }
  out.value = num / den;

  const std::size_t b = std::min(batches, n);
  out.batches = b;
  if (b < 2) return out;

  RunningMoments ratios;
  for (std::size_t j = 0; j < b; ++j) {
    // Block j covers [j*n/b, (j+1)*n/b); sizes differ by at most one.
    const std::size_t lo = j * n / b;
    const std::size_t hi = (j + 1) * n / b;
    double bn = 0.0;
    double bd = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      bn += numerators[i];
      bd += denominators[i];
    }
    ratios.add(bn / bd);
  }
  out.half_width = t_critical(b - 1, confidence) * ratios.std_error();
  return out;
}

SlopeFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("ols_fit: size mismatch");
  if (x.size() < 4) throw std::invalid_argument("ols_fit: need at least 4 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("ols_fit: x values are constant");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace aoi::stats
