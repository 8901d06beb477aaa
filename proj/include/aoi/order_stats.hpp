#pragma once

#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "aoi/rng.hpp"

namespace aoi {

/// k-th smallest of n i.i.d. Exp(rate) variables.
struct OrderStatSpec {
  std::int64_t k = 1;
  std::int64_t n = 1;
  double rate = 1.0;

  /// Throws std::invalid_argument unless 1 <= k <= n and rate > 0.
  void validate() const;
};

/// Above this index the partial sums switch to their asymptotic expansions.
inline constexpr std::int64_t kExactHarmonicLimit = 10'000'000;

/// Memoized partial sums H_m = sum 1/j and G_m = sum 1/j^2.
///
/// Small indices are served from a prefix table; larger indices below
/// kExactHarmonicLimit are summed exactly (smallest terms first) and cached.
/// At or above the limit:
///   H_m = ln m + gamma + 1/(2m) - 1/(12m^2) + 1/(120m^4),  |err| < 1/(252 m^6)
///   G_m = pi^2/6 - 1/m + 1/(2m^2) - 1/(6m^3) + 1/(30m^5),  |err| < 1/(42 m^7)
/// Both errors are far below double resolution there. Thread-safe.
class HarmonicCache {
 public:
  HarmonicCache();

  double harmonic(std::int64_t m) const;
  double gsum(std::int64_t m) const;

  /// H_hi - H_lo and G_hi - G_lo, summed directly when the gap is short so
  /// the difference keeps full precision at large indices.
  double harmonic_diff(std::int64_t hi, std::int64_t lo) const;
  double gsum_diff(std::int64_t hi, std::int64_t lo) const;

  static HarmonicCache& global();

 private:
  static constexpr std::int64_t kTableSize = 1 << 16;

  double lookup(std::int64_t m, bool squares) const;

  std::vector<double> h_table_;
  std::vector<double> g_table_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::int64_t, double> h_memo_;
  mutable std::unordered_map<std::int64_t, double> g_memo_;
};

double harmonic(std::int64_t m);
double gsum(std::int64_t m);

/// E[X_{k:n}] = (H_n - H_{n-k}) / rate.
double expected_order_stat(const OrderStatSpec& spec);
/// Var[X_{k:n}] = (G_n - G_{n-k}) / rate^2.
double variance_order_stat(const OrderStatSpec& spec);
/// E[X_{k:n}^2] = ((H_n - H_{n-k})^2 + G_n - G_{n-k}) / rate^2.
double second_moment_order_stat(const OrderStatSpec& spec);

enum class SamplingMethod {
  kAuto,      ///< closed forms for min/max, spacings for small k, beta otherwise
  kSpacings,  ///< sum of k independent Exp(rate*(n-i+1)) spacings, O(k)
  kSort,      ///< materialize n draws and select, O(n); reference only
};

/// One draw of X_{k:n}.
double sample_order_stat(const OrderStatSpec& spec, RngStream& rng,
                         SamplingMethod method = SamplingMethod::kAuto);

/// Max of `count` i.i.d. Exp(rate) draws; 0 when count == 0.
double sample_max_exponential(std::int64_t count, double rate, RngStream& rng);

}  // namespace aoi
