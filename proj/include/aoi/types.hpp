#pragma once

#include <cstddef>
#include <vector>

namespace aoi {

/// First two raw moments of a nonnegative duration.
struct MomentPair {
  double mean = 0.0;
  double second_moment = 0.0;

  double variance() const { return second_moment - mean * mean; }
  /// mean >= 0 and E[X^2] >= E[X]^2 up to `rel_tol` of E[X]^2.
  bool coherent(double rel_tol = 1e-12) const;

  static MomentPair deterministic(double value) { return {value, value * value}; }
};

/// Sum of independent durations: means add, E[(sum)^2] expands with
/// E[T_i T_j] = E[T_i] E[T_j] for i != j.
MomentPair sum_independent(const std::vector<MomentPair>& terms);

/// Link-delay rates indexed by depth: 0 is inter-cell, 1 is inter-subcell
/// inside a cell, ..., and the last entry is the innermost (same unit) rate.
struct LinkRates {
  std::vector<double> by_depth;

  LinkRates() = default;
  explicit LinkRates(std::vector<double> rates) : by_depth(std::move(rates)) {}

  /// All depths 0..h+1 at the same rate.
  static LinkRates uniform(int h, double rate = 1.0);

  double at(int depth) const;
  std::size_t size() const { return by_depth.size(); }
  LinkRates scaled(double factor) const;
  void validate(int h) const;
};

}  // namespace aoi
