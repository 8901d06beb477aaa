#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "aoi/age_renewal.hpp"
#include "aoi/hierarchy.hpp"
#include "aoi/plan.hpp"
#include "aoi/rng.hpp"
#include "aoi/types.hpp"

namespace aoi {

enum class Variant {
  kExact,    ///< phase definitions with parallel units waiting for the slowest
  kBounded,  ///< the upper-bounding terms the analytic moments are built from
};

const char* to_string(Variant v);

/// One session. parts follows PhaseMoments order (Y^I_I, Y^II_I, Y^III'_I,
/// Y_II, Y^I_III, Y^II_III, Y^III_III for the exact variant, the barred
/// bounding terms for the bounded one). Recursive sessions (h >= 2) only
/// fill the phase totals.
struct SessionSample {
  double y_phase1 = 0.0;
  double y_phase2 = 0.0;
  double y_phase3 = 0.0;
  double y_total = 0.0;
  Variant variant = Variant::kExact;
  std::array<double, 7> parts{};
};

/// Draws the link-delay order statistics used by the simulators. In
/// deterministic mode every draw is replaced by its expectation, which makes
/// each session length a constant (a testing hook).
class DelaySampler {
 public:
  explicit DelaySampler(bool deterministic = false) : deterministic_(deterministic) {}

  bool deterministic() const { return deterministic_; }

  /// Max of k i.i.d. Exp(rate); 0 when k == 0.
  double max_of(std::int64_t k, double rate, RngStream& rng) const;
  /// Sum over `rounds` independent maxima of k draws each.
  double rounds_of_max(std::int64_t rounds, std::int64_t k, double rate, RngStream& rng) const;
  /// Slowest of `units` parallel units, each running rounds_of_max.
  double slowest_unit(std::int64_t units, std::int64_t rounds, std::int64_t k, double rate,
                      RngStream& rng) const;

 private:
  bool deterministic_;
};

SessionSample simulate_session_bounded(const CountPlan& plan, const LinkRates& rates,
                                       RngStream& rng, const DelaySampler& sampler = DelaySampler{});

/// When a cell has a single subcell the inter-subcell routing steps of
/// Phase III have nothing to route and take no time.
SessionSample simulate_session_exact(const CountPlan& plan, const LinkRates& rates, RngStream& rng,
                                     const DelaySampler& sampler = DelaySampler{});

/// Time to build the mega packet of every depth-`depth` unit: TDMA exchange
/// at the innermost depth, otherwise the inner Phase I followed by
/// MIMO-like exchange between sub-units and the in-sub-unit broadcast.
double recursive_phase1(int depth, const LevelPlan& plan, const LinkRates& rates, RngStream& rng,
                        const DelaySampler& sampler = DelaySampler{});

/// Time to deliver packets held inside every depth-`depth` unit to their
/// recipients, ending in single-recipient relays at the innermost depth.
double recursive_phase3(int depth, const LevelPlan& plan, const LinkRates& rates, RngStream& rng,
                        const DelaySampler& sampler = DelaySampler{});

/// Phase II: cells take turns; each waits until all of its nodes_per_cell
/// destination cells are reached through the fastest of M^2 links.
double simulate_mimo_phase(std::int64_t cells, std::int64_t nodes_per_cell, double rate0,
                           RngStream& rng, const DelaySampler& sampler = DelaySampler{});

/// Exact session for any depth through the recursive phases.
SessionSample simulate_session_recursive(const LevelPlan& plan, const LinkRates& rates,
                                         RngStream& rng,
                                         const DelaySampler& sampler = DelaySampler{});

struct ExperimentOptions {
  std::size_t trials = 10'000;
  std::uint64_t seed = 1;
  Variant variant = Variant::kBounded;
  bool deterministic_delays = false;
  bool keep_samples = false;
};

struct ExperimentResult {
  AgeEstimate age;
  PhaseMoments empirical;  ///< per-term sample moments (zero for h >= 2)
  std::array<double, 7> term_std_errors{};
  std::array<MomentPair, 3> phases{};
  std::array<double, 3> phase_std_errors{};
  MomentPair session;
  double session_std_error = 0.0;
  std::vector<SessionSample> samples;  ///< filled when keep_samples is set
};

/// Samples `trials` i.i.d. sessions (trial i draws from make_stream(seed, i))
/// and feeds their lengths, in trial order, to time_average_from_trace.
/// Trials run on an OpenMP worker team; results do not depend on the
/// schedule. h <= 1 uses the flat simulators, h >= 2 the recursive exact one.
ExperimentResult run_experiment(const HierarchyConfig& cfg, const ExperimentOptions& options);

/// Single-threaded reference with identical output.
ExperimentResult run_experiment_serial(const HierarchyConfig& cfg,
                                       const ExperimentOptions& options);

/// Session generation only; `parallel` selects the OpenMP loop.
std::vector<SessionSample> generate_sessions(const HierarchyConfig& cfg,
                                             const ExperimentOptions& options, bool parallel);

}  // namespace aoi
