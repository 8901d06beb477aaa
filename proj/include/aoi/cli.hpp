#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/hierarchy.hpp"
#include "aoi/scheme.hpp"
#include "aoi/stats.hpp"

namespace aoi::cli {

enum ExitCode : int { kOk = 0, kInvalidConfig = 2, kNumericFailure = 3 };

/// Raised when a computed CSV cell is not finite.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExponentMode { kOptimal, kFixed };

/// Flat run description shared by every subcommand. Mirrors the JSON config
/// keys: n, h, mode, a, b, lambda0, lambda1, lambda2, trials, seed, out,
/// moments, variant.
struct SweepSpec {
  std::vector<double> n_values{1e6};
  std::vector<int> h_values{1};
  ExponentMode mode = ExponentMode::kOptimal;
  double a = 1.0 / 7.0;
  double b = 2.0 / 7.0;
  std::array<double, 3> lambdas{1.0, 1.0, 1.0};
  std::size_t trials = 10'000;
  std::uint64_t seed = 1;
  std::string out;  ///< empty: standard output
  MomentMode moments = MomentMode::kLargeN;
  Variant variant = Variant::kBounded;

  void validate(bool simulate) const;
};

/// Rates for depth h: lambda0..lambda2, deeper depths reuse lambda2.
LinkRates rates_for(const SweepSpec& spec, int h);
HierarchyConfig config_for(const SweepSpec& spec, double n, int h);

/// Sweep points in output order: every n for the first h, then the next h.
std::vector<std::pair<double, int>> sweep_points(const SweepSpec& spec);

extern const char* const kAnalyticHeader;
extern const char* const kSimulateHeader;
extern const char* const kOptimizeHeader;
extern const char* const kTdmaHeader;
extern const char* const kFitHeader;

std::string analytic_row(const SweepSpec& spec, double n, int h);
std::string simulate_row(const SweepSpec& spec, double n, int h);
std::string optimize_row(int h, const LinkRates& rates);

/// Analytic or simulated rows for every sweep point, computed on the worker
/// team and returned in sweep order.
std::vector<std::string> sweep_rows(const SweepSpec& spec, bool simulate);

/// Least-squares slope of ln(age / ln n) against ln n, one fit per depth.
struct DepthFit {
  int h = 0;
  std::size_t points = 0;
  stats::SlopeFit fit;
  double predicted_exponent = 0.0;
};
std::vector<DepthFit> fit_slopes(const SweepSpec& spec, bool simulate);
DepthFit fit_slope(int h, const std::vector<double>& n_values, const std::vector<double>& ages);

/// Entry point of the aoi_cli tool. Diagnostics go to `err`; CSV goes to
/// `out` unless an output path is configured.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aoi::cli
