#include "aoi/age_renewal.hpp"

#include <cmath>
#include <stdexcept>

#include "aoi/stats.hpp"

namespace aoi {

void SessionTrace::validate() const {
  for (double y : durations) {
    if (!(y > 0.0) || !std::isfinite(y)) {
      throw std::invalid_argument("session trace: durations must be positive and finite");
    }
  }
  if (delivery_offsets) {
    if (delivery_offsets->size() != durations.size()) {
      throw std::invalid_argument("session trace: one delivery offset per session required");
    }
    for (std::size_t j = 0; j < durations.size(); ++j) {
      const double d = (*delivery_offsets)[j];
      if (!(d > 0.0) || d > durations[j]) {
        throw std::invalid_argument("session trace: need 0 < D_j <= Y_j");
      }
    }
  }
}

double average_age_formula(const MomentPair& session, double mean_delay) {
  if (!(session.mean > 0.0)) throw std::invalid_argument("average age: E[Y] must be positive");
  if (mean_delay < 0.0) throw std::invalid_argument("average age: E[D] must be nonnegative");
  if (session.second_moment < session.mean * session.mean * (1.0 - 1e-12)) {
    throw std::invalid_argument("average age: E[Y^2] < E[Y]^2 is not a valid moment pair");
  }
  return mean_delay + session.second_moment / (2.0 * session.mean);
}

double average_age_session_end(const MomentPair& session) {
  return average_age_formula(session, session.mean);
}

AgeEstimate time_average_from_trace(const SessionTrace& trace) {
  if (trace.durations.size() < 2) {
    throw std::invalid_argument("time average: trace needs at least 2 sessions");
  }
  trace.validate();

  const auto& y = trace.durations;
  const std::size_t cycles = y.size() - 1;
  std::vector<double> area(cycles);
  std::vector<double> length(cycles);
  for (std::size_t j = 0; j < cycles; ++j) {
    const double start_age = trace.delivery_offsets ? (*trace.delivery_offsets)[j] : y[j];
    const double next_age = trace.delivery_offsets ? (*trace.delivery_offsets)[j + 1] : y[j + 1];
    const double span = y[j] - start_age + next_age;
    length[j] = span;
    area[j] = start_age * span + 0.5 * span * span;
  }

  const auto ratio = stats::batch_ratio(area, length, kAgeBatches);
  return AgeEstimate{ratio.value, ratio.half_width, y.size()};
}

}  // namespace aoi
