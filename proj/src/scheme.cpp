#include "aoi/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aoi/order_stats.hpp"
#include "aoi/stats.hpp"

namespace aoi {

const char* to_string(Variant v) { return v == Variant::kExact ? "exact" : "bounded"; }

// ---- DelaySampler ---------------------------------------------------------

double DelaySampler::max_of(std::int64_t k, double rate, RngStream& rng) const {
  if (k <= 0) return 0.0;
  if (deterministic_) return expected_order_stat({k, k, rate});
  return sample_max_exponential(k, rate, rng);
}

namespace {

// Uniform on the open interval (0, 1).
double open_uniform(RngStream& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Gamma(shape, 1) for a small integer shape as -log of a product of uniforms.
double gamma_small_int(std::int64_t shape, RngStream& rng) {
  double acc = 0.0;
  double product = 1.0;
  for (std::int64_t i = 0; i < shape; ++i) {
    product *= open_uniform(rng);
    if (product < 1e-280) {
      acc -= std::log(product);
      product = 1.0;
    }
  }
  return acc - std::log(product);
}

// Relative cost model: k gammas of `rounds` uniforms each versus `rounds`
// inverse-CDF maxima (three transcendental calls each).
bool prefer_spacing_sums(std::int64_t rounds, std::int64_t k) {
  return rounds <= 64 && k * (rounds + 4) < 13 * rounds;
}

}  // namespace

double DelaySampler::rounds_of_max(std::int64_t rounds, std::int64_t k, double rate,
                                   RngStream& rng) const {
  if (rounds <= 0 || k <= 0) return 0.0;
  if (deterministic_) return static_cast<double>(rounds) * expected_order_stat({k, k, rate});
  if (prefer_spacing_sums(rounds, k)) {
    // X_{k:k} = sum_j E_j / (j rate), so summing `rounds` copies collects
    // a Gamma(rounds) variable per spacing.
    double acc = 0.0;
    for (std::int64_t j = 1; j <= k; ++j) {
      acc += gamma_small_int(rounds, rng) / static_cast<double>(j);
    }
    return acc / rate;
  }
  double acc = 0.0;
  for (std::int64_t i = 0; i < rounds; ++i) acc += sample_max_exponential(k, rate, rng);
  return acc;
}

double DelaySampler::slowest_unit(std::int64_t units, std::int64_t rounds, std::int64_t k,
                                  double rate, RngStream& rng) const {
  if (units <= 0 || rounds <= 0 || k <= 0) return 0.0;
  if (deterministic_) return rounds_of_max(rounds, k, rate, rng);
  double slowest = 0.0;
  for (std::int64_t u = 0; u < units; ++u) {
    slowest = std::max(slowest, rounds_of_max(rounds, k, rate, rng));
  }
  return slowest;
}

// ---- flat simulators ------------------------------------------------------

namespace {

SessionSample assemble(const std::array<double, 7>& parts, Variant variant) {
  SessionSample s;
  s.variant = variant;
  s.parts = parts;
  s.y_phase1 = parts[0] + parts[1] + parts[2];
  s.y_phase2 = parts[3];
  s.y_phase3 = parts[4] + parts[5] + parts[6];
  s.y_total = s.y_phase1 + s.y_phase2 + s.y_phase3;
  return s;
}

double squared(std::int64_t m) { return static_cast<double>(m) * static_cast<double>(m); }

}  // namespace

double simulate_mimo_phase(std::int64_t cells, std::int64_t nodes_per_cell, double rate0,
                           RngStream& rng, const DelaySampler& sampler) {
  return sampler.rounds_of_max(cells, nodes_per_cell, rate0 * squared(nodes_per_cell), rng);
}

SessionSample simulate_session_bounded(const CountPlan& plan, const LinkRates& rates,
                                       RngStream& rng, const DelaySampler& sampler) {
  plan.validate();
  rates.validate(plan.depth);
  const std::int64_t total = plan.total_nodes();
  std::array<double, 7> p{};

  if (plan.depth == 0) {
    const double l1 = rates.at(1);
    p[0] = sampler.rounds_of_max(plan.nodes_per_cell, total, l1, rng);
    p[3] = simulate_mimo_phase(plan.cells, plan.nodes_per_cell, rates.at(0), rng, sampler);
    p[6] = sampler.rounds_of_max(plan.nodes_per_cell, plan.cells, l1, rng);
    return assemble(p, Variant::kBounded);
  }

  const std::int64_t sub = plan.nodes_per_subcell;
  const std::int64_t fan = plan.subcells_per_cell;
  const double l2 = rates.at(2);
  const double mimo = rates.at(1) * squared(sub);
  p[0] = sampler.rounds_of_max(sub, total, l2, rng);
  p[1] = sampler.rounds_of_max(fan, plan.total_subcells(), mimo, rng);
  p[2] = sampler.rounds_of_max(fan, total, l2, rng);
  p[3] = simulate_mimo_phase(plan.cells, plan.nodes_per_cell, rates.at(0), rng, sampler);
  p[4] = sampler.rounds_of_max(sub, total, l2, rng);
  p[5] = sampler.rounds_of_max(fan, plan.cells * sub, mimo, rng);
  p[6] = sampler.rounds_of_max(sub, plan.total_subcells(), l2, rng);
  return assemble(p, Variant::kBounded);
}

SessionSample simulate_session_exact(const CountPlan& plan, const LinkRates& rates, RngStream& rng,
                                     const DelaySampler& sampler) {
  plan.validate();
  rates.validate(plan.depth);
  std::array<double, 7> p{};

  if (plan.depth == 0) {
    const std::int64_t m = plan.nodes_per_cell;
    const double l1 = rates.at(1);
    // Every node broadcasts to the other m-1 nodes of its cell in turn.
    p[0] = sampler.slowest_unit(plan.cells, m, m - 1, l1, rng);
    p[3] = simulate_mimo_phase(plan.cells, m, rates.at(0), rng, sampler);
    // m packets relayed one at a time to a single recipient each.
    p[6] = sampler.slowest_unit(plan.cells, m, 1, l1, rng);
    return assemble(p, Variant::kExact);
  }

  const std::int64_t sub = plan.nodes_per_subcell;
  const std::int64_t fan = plan.subcells_per_cell;
  const std::int64_t subcells = plan.total_subcells();
  const double l2 = rates.at(2);
  const double mimo = rates.at(1) * squared(sub);

  p[0] = sampler.slowest_unit(subcells, sub, sub - 1, l2, rng);
  p[1] = sampler.slowest_unit(plan.cells, fan, fan - 1, mimo, rng);
  p[2] = sampler.slowest_unit(subcells, fan - 1, sub - 1, l2, rng);
  p[3] = simulate_mimo_phase(plan.cells, plan.nodes_per_cell, rates.at(0), rng, sampler);
  if (fan > 1) {
    p[4] = sampler.slowest_unit(subcells, sub, sub - 1, l2, rng);
    p[5] = sampler.slowest_unit(plan.cells, fan, sub, mimo, rng);
  }
  p[6] = sampler.slowest_unit(subcells, sub, 1, l2, rng);
  return assemble(p, Variant::kExact);
}

// ---- recursive simulators -------------------------------------------------

namespace {

void check_depth(int depth, const LevelPlan& plan, const LinkRates& rates) {
  plan.validate();
  rates.validate(plan.depth());
  if (depth < 1 || depth > plan.depth() + 1) {
    throw std::invalid_argument("recursive phase: depth outside the plan");
  }
}

double phase1_at(int d, const LevelPlan& plan, const LinkRates& rates, RngStream& rng,
                 const DelaySampler& sampler) {
  const std::int64_t units = plan.units_at(d);
  const std::int64_t nodes = plan.nodes_in_unit(d);
  if (d == plan.depth() + 1) return sampler.slowest_unit(units, nodes, nodes - 1, rates.at(d), rng);

  const std::int64_t inner = plan.nodes_in_unit(d + 1);
  const std::int64_t fan = plan.fanout(d);
  double t = phase1_at(d + 1, plan, rates, rng, sampler);
  t += sampler.slowest_unit(units, fan, fan - 1, rates.at(d) * squared(inner), rng);
  t += sampler.slowest_unit(plan.units_at(d + 1), fan - 1, inner - 1, rates.at(d + 1), rng);
  return t;
}

double phase3_at(int d, const LevelPlan& plan, const LinkRates& rates, RngStream& rng,
                 const DelaySampler& sampler) {
  const std::int64_t units = plan.units_at(d);
  const std::int64_t nodes = plan.nodes_in_unit(d);
  if (d == plan.depth() + 1) return sampler.slowest_unit(units, nodes, 1, rates.at(d), rng);

  const std::int64_t inner = plan.nodes_in_unit(d + 1);
  const std::int64_t fan = plan.fanout(d);
  double t = 0.0;
  if (fan > 1) {
    t += sampler.slowest_unit(plan.units_at(d + 1), inner, inner - 1, rates.at(d + 1), rng);
    t += sampler.slowest_unit(units, fan, inner, rates.at(d) * squared(inner), rng);
  }
  return t + phase3_at(d + 1, plan, rates, rng, sampler);
}

}  // namespace

double recursive_phase1(int depth, const LevelPlan& plan, const LinkRates& rates, RngStream& rng,
                        const DelaySampler& sampler) {
  check_depth(depth, plan, rates);
  return phase1_at(depth, plan, rates, rng, sampler);
}

double recursive_phase3(int depth, const LevelPlan& plan, const LinkRates& rates, RngStream& rng,
                        const DelaySampler& sampler) {
  check_depth(depth, plan, rates);
  return phase3_at(depth, plan, rates, rng, sampler);
}

SessionSample simulate_session_recursive(const LevelPlan& plan, const LinkRates& rates,
                                         RngStream& rng, const DelaySampler& sampler) {
  check_depth(1, plan, rates);
  SessionSample s;
  s.variant = Variant::kExact;
  s.y_phase1 = phase1_at(1, plan, rates, rng, sampler);
  s.y_phase2 = simulate_mimo_phase(plan.cells, plan.nodes_in_unit(1), rates.at(0), rng, sampler);
  s.y_phase3 = phase3_at(1, plan, rates, rng, sampler);
  s.y_total = s.y_phase1 + s.y_phase2 + s.y_phase3;
  return s;
}

// ---- experiments ----------------------------------------------------------

namespace {

struct SessionKernel {
  int h = 0;
  Variant variant = Variant::kBounded;
  CountPlan plan;
  LevelPlan levels;
  LinkRates rates;
  DelaySampler sampler;

  SessionSample operator()(RngStream& rng) const {
    if (h >= 2) return simulate_session_recursive(levels, rates, rng, sampler);
    return variant == Variant::kExact ? simulate_session_exact(plan, rates, rng, sampler)
                                      : simulate_session_bounded(plan, rates, rng, sampler);
  }
};

SessionKernel make_kernel(const HierarchyConfig& cfg, const ExperimentOptions& options) {
  cfg.validate();
  if (options.trials < 100) throw std::invalid_argument("experiments need at least 100 trials");
  SessionKernel k;
  k.h = cfg.h;
  k.variant = options.variant;
  k.rates = cfg.rates;
  k.sampler = DelaySampler{options.deterministic_delays};
  if (cfg.h >= 2) {
    if (options.variant == Variant::kBounded) {
      throw std::invalid_argument("the bounded variant is defined for h <= 1 only");
    }
    k.levels = cfg.level_plan();
  } else {
    k.plan = cfg.count_plan();
  }
  return k;
}

ExperimentResult summarize(std::vector<SessionSample> samples, bool keep) {
  ExperimentResult out;
  std::array<stats::RunningMoments, 7> terms;
  std::array<stats::RunningMoments, 3> phases;
  stats::RunningMoments session;
  SessionTrace trace;
  trace.durations.reserve(samples.size());
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < 7; ++i) terms[i].add(s.parts[i]);
    phases[0].add(s.y_phase1);
    phases[1].add(s.y_phase2);
    phases[2].add(s.y_phase3);
    session.add(s.y_total);
    trace.durations.push_back(s.y_total);
  }
  for (std::size_t i = 0; i < 7; ++i) {
    out.empirical.term(i) = {terms[i].mean(), terms[i].second_moment()};
    out.term_std_errors[i] = terms[i].std_error();
  }
  for (std::size_t i = 0; i < 3; ++i) {
    out.phases[i] = {phases[i].mean(), phases[i].second_moment()};
    out.phase_std_errors[i] = phases[i].std_error();
  }
  out.session = {session.mean(), session.second_moment()};
  out.session_std_error = session.std_error();
  out.age = time_average_from_trace(trace);
  if (keep) out.samples = std::move(samples);
  return out;
}

}  // namespace

std::vector<SessionSample> generate_sessions(const HierarchyConfig& cfg,
                                             const ExperimentOptions& options, bool parallel) {
  const SessionKernel kernel = make_kernel(cfg, options);
  const auto trials = static_cast<std::int64_t>(options.trials);
  std::vector<SessionSample> samples(options.trials);
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < trials; ++i) {
      RngStream rng = make_stream(options.seed, static_cast<std::uint64_t>(i));
      samples[static_cast<std::size_t>(i)] = kernel(rng);
    }
  } else {
    for (std::int64_t i = 0; i < trials; ++i) {
      RngStream rng = make_stream(options.seed, static_cast<std::uint64_t>(i));
      samples[static_cast<std::size_t>(i)] = kernel(rng);
    }
  }
  return samples;
}

ExperimentResult run_experiment(const HierarchyConfig& cfg, const ExperimentOptions& options) {
  return summarize(generate_sessions(cfg, options, true), options.keep_samples);
}

ExperimentResult run_experiment_serial(const HierarchyConfig& cfg,
                                       const ExperimentOptions& options) {
  return summarize(generate_sessions(cfg, options, false), options.keep_samples);
}

}  // namespace aoi
