#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "aoi/types.hpp"

namespace aoi {

/// Consecutive session lengths Y_1, Y_2, ... and optionally the delay D_j
/// from the start of session j to the delivery of the update generated then.
struct SessionTrace {
  std::vector<double> durations;
  std::optional<std::vector<double>> delivery_offsets;

  void validate() const;
};

struct AgeEstimate {
  double mean_age = 0.0;
  double half_width = 0.0;  ///< 95% batch-means half-width
  std::size_t sessions_used = 0;
};

/// Renewal-reward average age E[D] + E[Y^2] / (2 E[Y]).
/// Throws std::invalid_argument for a non-positive mean or E[Y^2] < E[Y]^2.
double average_age_formula(const MomentPair& session, double mean_delay);

/// Same with every update delivered at the end of its session (D = Y).
double average_age_session_end(const MomentPair& session);

inline constexpr std::size_t kAgeBatches = 100;

/// Exact area under the sawtooth age curve divided by elapsed time.
///
/// The integral starts at the first delivery, so the first session only
/// seeds the age level. Between the delivery of update j (age D_j) and
/// update j+1 the age grows linearly for L = Y_j - D_j + D_{j+1}, adding
/// D_j * L + L^2 / 2. Without offsets D_j = Y_j and the cycle area is
/// Y_j * Y_{j+1} + Y_{j+1}^2 / 2. Needs at least two sessions.
AgeEstimate time_average_from_trace(const SessionTrace& trace);

}  // namespace aoi
