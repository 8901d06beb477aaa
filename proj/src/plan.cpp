#include "aoi/plan.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aoi {

namespace {

std::int64_t round_count(double x) {
  if (!std::isfinite(x) || x > 9.0e15) {
    throw std::invalid_argument("count " + std::to_string(x) + " does not fit the simulator");
  }
  return std::max<std::int64_t>(1, std::llround(x));
}

}  // namespace

void CountPlan::validate() const {
  if (cells < 1 || nodes_per_cell < 1 || subcells_per_cell < 1 || nodes_per_subcell < 1) {
    throw std::invalid_argument("count plan: all counts must be >= 1");
  }
  if (depth != 0 && depth != 1) throw std::invalid_argument("count plan: depth must be 0 or 1");
  if (nodes_per_subcell * subcells_per_cell != nodes_per_cell) {
    throw std::invalid_argument("count plan: nodes_per_subcell * subcells_per_cell != nodes_per_cell");
  }
  if (depth == 0 && subcells_per_cell != 1) {
    throw std::invalid_argument("count plan: depth 0 has exactly one subcell per cell");
  }
}

std::int64_t LevelPlan::nodes_in_unit(int d) const {
  if (d < 1 || d > depth() + 1) throw std::invalid_argument("level plan: depth out of range");
  return unit_nodes[static_cast<std::size_t>(d - 1)];
}

std::int64_t LevelPlan::units_at(int d) const { return total_nodes() / nodes_in_unit(d); }

std::int64_t LevelPlan::fanout(int d) const { return nodes_in_unit(d) / nodes_in_unit(d + 1); }

void LevelPlan::validate() const {
  if (cells < 1 || unit_nodes.empty()) throw std::invalid_argument("level plan: empty");
  for (std::size_t i = 0; i < unit_nodes.size(); ++i) {
    if (unit_nodes[i] < 1) throw std::invalid_argument("level plan: unit sizes must be >= 1");
    if (i + 1 < unit_nodes.size() && unit_nodes[i] % unit_nodes[i + 1] != 0) {
      throw std::invalid_argument("level plan: unit sizes must nest exactly");
    }
  }
}

LevelPlan to_level_plan(const CountPlan& plan) {
  plan.validate();
  LevelPlan out;
  out.cells = plan.cells;
  out.unit_nodes = {plan.nodes_per_cell};
  if (plan.depth == 1) out.unit_nodes.push_back(plan.nodes_per_subcell);
  return out;
}

LevelPlan make_level_plan(double n, std::span<const double> exponents) {
  if (!(n >= 1.0)) throw std::invalid_argument("network size must be >= 1");
  if (exponents.empty()) throw std::invalid_argument("level plan: no exponents");
  const std::size_t levels = exponents.size();
  std::vector<std::int64_t> sizes(levels);
  sizes[levels - 1] = round_count(std::pow(n, exponents[levels - 1]));
  for (std::size_t i = levels - 1; i > 0; --i) {
    sizes[i - 1] = round_count(std::pow(n, exponents[i - 1] - exponents[i])) * sizes[i];
  }
  LevelPlan out;
  out.unit_nodes = std::move(sizes);
  out.cells = round_count(n / static_cast<double>(out.unit_nodes.front()));
  out.validate();
  return out;
}

CountPlan make_count_plan(double n, int h, double a, double b) {
  if (h != 0 && h != 1) throw std::invalid_argument("count plan: h must be 0 or 1");
  CountPlan plan;
  plan.depth = h;
  if (h == 0) {
    const double exps[] = {b};
    const auto lp = make_level_plan(n, exps);
    plan.cells = lp.cells;
    plan.nodes_per_cell = plan.nodes_per_subcell = lp.unit_nodes[0];
    plan.subcells_per_cell = 1;
  } else {
    const double exps[] = {b, a};
    const auto lp = make_level_plan(n, exps);
    plan.cells = lp.cells;
    plan.nodes_per_cell = lp.unit_nodes[0];
    plan.nodes_per_subcell = lp.unit_nodes[1];
    plan.subcells_per_cell = lp.unit_nodes[0] / lp.unit_nodes[1];
  }
  plan.validate();
  return plan;
}

}  // namespace aoi
