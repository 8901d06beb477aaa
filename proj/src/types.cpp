#include "aoi/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aoi {

bool MomentPair::coherent(double rel_tol) const {
  return mean >= 0.0 && std::isfinite(second_moment) &&
         second_moment >= mean * mean * (1.0 - rel_tol);
}

MomentPair sum_independent(const std::vector<MomentPair>& terms) {
  MomentPair out;
  double sum_second = 0.0;
  for (const auto& t : terms) {
    out.mean += t.mean;
    sum_second += t.second_moment;
  }
  // E[(sum T)^2] = sum E[T_i^2] + (sum E[T_i])^2 - sum E[T_i]^2
  double sum_mean_sq = 0.0;
  for (const auto& t : terms) sum_mean_sq += t.mean * t.mean;
  out.second_moment = sum_second + out.mean * out.mean - sum_mean_sq;
  return out;
}

LinkRates LinkRates::uniform(int h, double rate) {
  if (h < 0) throw std::invalid_argument("hierarchy depth must be >= 0");
  return LinkRates(std::vector<double>(static_cast<std::size_t>(h) + 2, rate));
}

double LinkRates::at(int depth) const {
  if (depth < 0 || static_cast<std::size_t>(depth) >= by_depth.size()) {
    throw std::invalid_argument("no link rate configured for depth " + std::to_string(depth));
  }
  return by_depth[static_cast<std::size_t>(depth)];
}

LinkRates LinkRates::scaled(double factor) const {
  LinkRates out = *this;
  for (auto& r : out.by_depth) r *= factor;
  return out;
}

void LinkRates::validate(int h) const {
  if (by_depth.size() < static_cast<std::size_t>(h) + 2) {
    throw std::invalid_argument("depth " + std::to_string(h) + " needs " + std::to_string(h + 2) +
                                " link rates, got " + std::to_string(by_depth.size()));
  }
  for (double r : by_depth) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("link rates must be positive and finite");
    }
  }
}

}  // namespace aoi
