#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace aoi {

/// Integer node counts for the h <= 1 scheme. At depth 0 a cell has a single
/// subcell holding all of its nodes.
struct CountPlan {
  std::int64_t cells = 1;
  std::int64_t nodes_per_cell = 1;
  std::int64_t subcells_per_cell = 1;
  std::int64_t nodes_per_subcell = 1;
  int depth = 1;

  std::int64_t total_nodes() const { return cells * nodes_per_cell; }
  std::int64_t total_subcells() const { return cells * subcells_per_cell; }

  /// Throws std::invalid_argument on counts < 1, a depth outside {0, 1} or
  /// nodes_per_subcell * subcells_per_cell != nodes_per_cell.
  void validate() const;
};

/// Nested unit sizes for general depth. unit_nodes[d-1] is the node count of
/// a depth-d unit (d = 1 is a cell, d = h+1 the innermost subcell); each
/// entry is an exact multiple of the next.
struct LevelPlan {
  std::int64_t cells = 1;
  std::vector<std::int64_t> unit_nodes{1};

  int depth() const { return static_cast<int>(unit_nodes.size()) - 1; }
  std::int64_t total_nodes() const { return cells * unit_nodes.front(); }
  std::int64_t nodes_in_unit(int d) const;
  /// Number of depth-d units in the whole network.
  std::int64_t units_at(int d) const;
  /// Depth-(d+1) units per depth-d unit.
  std::int64_t fanout(int d) const;

  void validate() const;
};

LevelPlan to_level_plan(const CountPlan& plan);

/// Rounds n^{b_h} to the innermost unit size, then n^{b_{d-1}-b_d} to each
/// fanout (all to the nearest integer >= 1), multiplies outward, and sets
/// cells = round(n / nodes_per_cell).
LevelPlan make_level_plan(double n, std::span<const double> exponents);

/// h = 0 uses exponents {b}; h = 1 uses {b, a}.
CountPlan make_count_plan(double n, int h, double a, double b);

}  // namespace aoi
