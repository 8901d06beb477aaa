#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aoi/plan.hpp"
#include "aoi/types.hpp"

namespace aoi {

/// Exact fraction with a positive denominator in lowest terms.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend Rational operator+(const Rational& x, const Rational& y);
  friend Rational operator-(const Rational& x, const Rational& y);
  friend Rational operator*(const Rational& x, const Rational& y);
  friend Rational operator/(const Rational& x, const Rational& y);
  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& x, const Rational& y);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Scaling exponent 1 / (3 * 2^h + 1); valid for 0 <= h <= 40.
Rational alpha(int h);

/// Per-level cell exponents b_0 > b_1 > ... > b_h for depth h: b_l = b_0 / 2^l
/// with b_0 fixed by b_0 / 2^h = 1 - 3 b_0, so b_h = alpha(h).
std::vector<Rational> general_h_exponent_schedule(int h);

/// Network size, depth, exponents and link rates for one analytic point.
///
/// Cells hold n^b nodes. For h >= 1 each cell splits into subcells of n^a
/// nodes (0 < a < b); deeper levels continue the ratio a/b, so level l has
/// exponent b * (a/b)^l. rates.at(d) is the delay rate of links whose
/// smallest common unit has depth d (0 = whole network).
struct HierarchyConfig {
  double n = 1.0;
  int h = 1;
  double a = 1.0 / 7.0;
  double b = 2.0 / 7.0;
  LinkRates rates = LinkRates::uniform(1);

  void validate() const;
  std::vector<double> exponent_schedule() const;
  CountPlan count_plan() const;  // h <= 1
  LevelPlan level_plan() const;

  /// Config at the exponents returned by optimize_exponents.
  static HierarchyConfig optimal(double n, int h, LinkRates rates);
};

enum class MomentMode {
  kLargeN,  ///< real-valued counts, H_m -> ln m and G_m -> pi^2/6
  kExact,   ///< rounded counts, exact H_m and G_m
};

/// Moments of the seven independent duration terms of the bounded session.
/// At h = 0 the inter-subcell terms are zero, v1_i is the in-cell exchange
/// and v3_iii the in-cell relay.
struct PhaseMoments {
  MomentPair v1_i;          // n^a rounds of X^(2)_{n:n}
  MomentPair v1_ii;         // n^{b-a} rounds of (X^(1)_{1:n^{2a}})_{n^{1-a}:n^{1-a}}
  MomentPair v1_iii_prime;  // n^{b-a} rounds of X^(2)_{n:n}
  MomentPair y_ii;          // n^{1-b} rounds of (X^(0)_{1:n^{2b}})_{n^b:n^b}
  MomentPair v3_i;          // n^a rounds of X^(2)_{n:n}
  MomentPair v3_ii;         // n^{b-a} rounds of (X^(1)_{1:n^{2a}})_{n^{1-b+a}:n^{1-b+a}}
  MomentPair v3_iii;        // n^a rounds of X^(2)_{n^{1-a}:n^{1-a}}

  static constexpr std::array<const char*, 7> kNames = {
      "v1_i", "v1_ii", "v1_iii_prime", "y_ii", "v3_i", "v3_ii", "v3_iii"};

  std::array<MomentPair, 7> terms() const;
  MomentPair& term(std::size_t i);
  MomentPair phase1() const;
  MomentPair phase2() const { return y_ii; }
  MomentPair phase3() const;
  MomentPair total() const;
};

/// Large-n closed forms (h in {0, 1}); counts stay real-valued.
PhaseMoments phase_moments_approx(const HierarchyConfig& cfg);

/// Exact moments of the bounded terms for an integer plan.
PhaseMoments phase_moments_exact(const CountPlan& plan, const LinkRates& rates);

PhaseMoments phase_moments(const HierarchyConfig& cfg, MomentMode mode);

/// Grouped large-n first moments of the Phase I and Phase III bounds,
/// written in their collected form.
double grouped_phase1_mean_approx(const HierarchyConfig& cfg);
double grouped_phase3_mean_approx(const HierarchyConfig& cfg);

/// E[Y_II] = cells * H_{M} / (rate0 * M^2) for M nodes per cell.
double exact_mimo_phase_mean(const CountPlan& plan, double rate0);
double exact_mimo_phase_mean(const HierarchyConfig& cfg);

/// E[D] + E[Y^2] / (2 E[Y]) for the bounded session; E[D] defaults to E[Y].
double average_age_from_moments(const PhaseMoments& moments,
                                std::optional<double> mean_delay = std::nullopt);

/// Average age of one S-D pair for h in {0, 1}.
double average_age_analytic(const HierarchyConfig& cfg, MomentMode mode = MomentMode::kLargeN,
                            std::optional<double> mean_delay = std::nullopt);

/// Dominant growth exponent of the bounded session at (a, b):
/// max(b, 1-3b) for h = 0 and max(a, b-a, b-3a, 1-3b) for h = 1.
double growth_exponent(int h, double a, double b);

struct ExponentChoice {
  std::optional<double> a;      ///< absent at h = 0
  double b = 0.0;
  double exponent = 0.0;        ///< achieved (h <= 1) or predicted growth exponent
  std::vector<double> schedule; ///< b_0 .. b_h
};

/// h <= 1: nested grid search minimizing growth_exponent. h >= 2: exponent
/// balance via general_h_exponent_schedule. Exponents do not depend on the
/// rates or on n; both are validated only.
ExponentChoice optimize_exponents(int h, double n, const LinkRates& rates);

}  // namespace aoi
