#include "aoi/order_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace aoi {

namespace {

constexpr std::int64_t kDirectDiffSpan = 4096;

double asymptotic_harmonic(double m) {
  const double inv = 1.0 / m;
  const double inv2 = inv * inv;
  return std::log(m) + std::numbers::egamma + 0.5 * inv - inv2 / 12.0 + inv2 * inv2 / 120.0;
}

double asymptotic_gsum(double m) {
  const double inv = 1.0 / m;
  const double inv2 = inv * inv;
  return std::numbers::pi * std::numbers::pi / 6.0 - inv + 0.5 * inv2 - inv2 * inv / 6.0 +
         inv2 * inv2 * inv / 30.0;
}

// sum_{j=lo+1}^{hi} 1/j (or 1/j^2), smallest terms first.
double tail_sum(std::int64_t hi, std::int64_t lo, bool squares) {
  double acc = 0.0;
  for (std::int64_t j = hi; j > lo; --j) {
    const double x = static_cast<double>(j);
    acc += squares ? 1.0 / (x * x) : 1.0 / x;
  }
  return acc;
}

void require_index(std::int64_t m) {
  if (m < 0) throw std::invalid_argument("harmonic index must be >= 0, got " + std::to_string(m));
}

}  // namespace

void OrderStatSpec::validate() const {
  if (n < 1) throw std::invalid_argument("order statistic: n must be >= 1");
  if (k < 1 || k > n) {
    throw std::invalid_argument("order statistic: need 1 <= k <= n, got k=" + std::to_string(k) +
                                " n=" + std::to_string(n));
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("order statistic: rate must be positive and finite");
  }
}

HarmonicCache::HarmonicCache() : h_table_(kTableSize + 1, 0.0), g_table_(kTableSize + 1, 0.0) {
  for (std::int64_t j = 1; j <= kTableSize; ++j) {
    const double x = static_cast<double>(j);
    h_table_[j] = h_table_[j - 1] + 1.0 / x;
    g_table_[j] = g_table_[j - 1] + 1.0 / (x * x);
  }
}

HarmonicCache& HarmonicCache::global() {
  static HarmonicCache cache;
  return cache;
}

double HarmonicCache::lookup(std::int64_t m, bool squares) const {
  require_index(m);
  if (m <= kTableSize) return squares ? g_table_[m] : h_table_[m];
  if (m >= kExactHarmonicLimit) {
    return squares ? asymptotic_gsum(static_cast<double>(m))
                   : asymptotic_harmonic(static_cast<double>(m));
  }
  auto& memo = squares ? g_memo_ : h_memo_;
  {
    std::shared_lock lock(mutex_);
    if (auto it = memo.find(m); it != memo.end()) return it->second;
  }
  const double value = tail_sum(m, kTableSize, squares) +
                       (squares ? g_table_[kTableSize] : h_table_[kTableSize]);
  std::unique_lock lock(mutex_);
  memo.emplace(m, value);
  return value;
}

double HarmonicCache::harmonic(std::int64_t m) const { return lookup(m, false); }
double HarmonicCache::gsum(std::int64_t m) const { return lookup(m, true); }

double HarmonicCache::harmonic_diff(std::int64_t hi, std::int64_t lo) const {
  require_index(lo);
  if (hi < lo) throw std::invalid_argument("harmonic_diff: hi < lo");
  if (hi - lo <= kDirectDiffSpan) return tail_sum(hi, lo, false);
  return harmonic(hi) - harmonic(lo);
}

double HarmonicCache::gsum_diff(std::int64_t hi, std::int64_t lo) const {
  require_index(lo);
  if (hi < lo) throw std::invalid_argument("gsum_diff: hi < lo");
  if (hi - lo <= kDirectDiffSpan) return tail_sum(hi, lo, true);
  return gsum(hi) - gsum(lo);
}

double harmonic(std::int64_t m) { return HarmonicCache::global().harmonic(m); }
double gsum(std::int64_t m) { return HarmonicCache::global().gsum(m); }

double expected_order_stat(const OrderStatSpec& spec) {
  spec.validate();
  // Min of n exponentials is Exp(n * rate).
  if (spec.k == 1) return 1.0 / (static_cast<double>(spec.n) * spec.rate);
  return HarmonicCache::global().harmonic_diff(spec.n, spec.n - spec.k) / spec.rate;
}

double variance_order_stat(const OrderStatSpec& spec) {
  spec.validate();
  return HarmonicCache::global().gsum_diff(spec.n, spec.n - spec.k) / (spec.rate * spec.rate);
}

double second_moment_order_stat(const OrderStatSpec& spec) {
  spec.validate();
  const auto& cache = HarmonicCache::global();
  const double h = cache.harmonic_diff(spec.n, spec.n - spec.k);
  const double g = cache.gsum_diff(spec.n, spec.n - spec.k);
  return (h * h + g) / (spec.rate * spec.rate);
}

double sample_max_exponential(std::int64_t count, double rate, RngStream& rng) {
  if (count <= 0) return 0.0;
  if (count == 1) return std::exponential_distribution<double>{rate}(rng);
  // Inverse CDF of the max: F(x) = (1 - e^{-rate x})^count.
  const double u = std::uniform_real_distribution<double>{0.0, 1.0}(rng);
  return -std::log(-std::expm1(std::log(u) / static_cast<double>(count))) / rate;
}

namespace {

double sample_spacings(const OrderStatSpec& spec, RngStream& rng) {
  std::exponential_distribution<double> unit{1.0};
  double acc = 0.0;
  for (std::int64_t i = 0; i < spec.k; ++i) {
    acc += unit(rng) / static_cast<double>(spec.n - i);
  }
  return acc / spec.rate;
}

double sample_sorted(const OrderStatSpec& spec, RngStream& rng) {
  std::exponential_distribution<double> dist{spec.rate};
  std::vector<double> draws(static_cast<std::size_t>(spec.n));
  for (auto& d : draws) d = dist(rng);
  auto kth = draws.begin() + (spec.k - 1);
  std::nth_element(draws.begin(), kth, draws.end());
  return *kth;
}

double sample_beta_route(const OrderStatSpec& spec, RngStream& rng) {
  // U_(k) ~ Beta(k, n-k+1) = Ga/(Ga+Gb); X = -log(1-U)/rate = log1p(Ga/Gb)/rate.
  const double ga = std::gamma_distribution<double>{static_cast<double>(spec.k), 1.0}(rng);
  const double gb =
      std::gamma_distribution<double>{static_cast<double>(spec.n - spec.k + 1), 1.0}(rng);
  return std::log1p(ga / gb) / spec.rate;
}

}  // namespace

double sample_order_stat(const OrderStatSpec& spec, RngStream& rng, SamplingMethod method) {
  spec.validate();
  switch (method) {
    case SamplingMethod::kSpacings:
      return sample_spacings(spec, rng);
    case SamplingMethod::kSort:
      return sample_sorted(spec, rng);
    case SamplingMethod::kAuto:
      break;
  }
  if (spec.k == 1) {
    return std::exponential_distribution<double>{spec.rate * static_cast<double>(spec.n)}(rng);
  }
  if (spec.k == spec.n) return sample_max_exponential(spec.n, spec.rate, rng);
  if (spec.k <= 64) return sample_spacings(spec, rng);
  return sample_beta_route(spec, rng);
}

}  // namespace aoi
