#include "aoi/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "aoi/geometry.hpp"

namespace aoi::cli {

const char* const kAnalyticHeader =
    "n,h,a,b,moments,delta,phase1_mean,phase2_mean,phase3_mean,session_mean,"
    "session_second_moment,predicted_exponent";
const char* const kSimulateHeader =
    "n,h,a,b,variant,trials,seed,cells,nodes_per_cell,subcells_per_cell,nodes_per_subcell,"
    "age,age_ci_half_width,phase1_mean,phase1_second_moment,phase2_mean,phase2_second_moment,"
    "phase3_mean,phase3_second_moment,session_mean,session_std_error,analytic_age,"
    "analytic_phase1_mean,analytic_phase2_mean,analytic_phase3_mean";
const char* const kOptimizeHeader = "h,a,b,exponent,alpha";
const char* const kTdmaHeader = "grid_side,gamma,worst_case,slot,active_cells,violations,verdict";
const char* const kFitHeader = "h,points,slope,intercept,r_squared,predicted_exponent";

namespace {

std::string num(double x) {
  if (!std::isfinite(x)) throw NumericFailure("non-finite value in output");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string join(std::initializer_list<std::string> cells) {
  std::string row;
  for (const auto& c : cells) {
    if (!row.empty()) row += ',';
    row += c;
  }
  return row;
}

const char* moment_name(MomentMode m) { return m == MomentMode::kExact ? "exact" : "large-n"; }

MomentMode parse_moments(const std::string& s) {
  if (s == "exact") return MomentMode::kExact;
  if (s == "large-n") return MomentMode::kLargeN;
  throw std::invalid_argument("moments must be 'exact' or 'large-n', got '" + s + "'");
}

Variant parse_variant(const std::string& s) {
  if (s == "exact") return Variant::kExact;
  if (s == "bounded") return Variant::kBounded;
  throw std::invalid_argument("variant must be 'exact' or 'bounded', got '" + s + "'");
}

ExponentMode parse_mode(const std::string& s) {
  if (s == "optimal") return ExponentMode::kOptimal;
  if (s == "fixed") return ExponentMode::kFixed;
  throw std::invalid_argument("mode must be 'optimal' or 'fixed', got '" + s + "'");
}

template <typename F>
void for_each_parallel(std::size_t count, F&& body) {
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void SweepSpec::validate(bool simulate) const {
  if (n_values.empty() || h_values.empty()) {
    throw std::invalid_argument("n and h lists must be nonempty");
  }
  for (double n : n_values) {
    if (!(n > 1.0) || !std::isfinite(n)) throw std::invalid_argument("n values must exceed 1");
  }
  for (int h : h_values) {
    if (h < 0) throw std::invalid_argument("h values must be >= 0");
  }
  for (double l : lambdas) {
    if (!(l > 0.0)) throw std::invalid_argument("rates must be positive");
  }
  if (simulate && trials < 100) throw std::invalid_argument("simulation needs trials >= 100");
}

LinkRates rates_for(const SweepSpec& spec, int h) {
  std::vector<double> r;
  for (int d = 0; d <= h + 1; ++d) r.push_back(spec.lambdas[static_cast<std::size_t>(std::min(d, 2))]);
  return LinkRates(std::move(r));
}

HierarchyConfig config_for(const SweepSpec& spec, double n, int h) {
  if (spec.mode == ExponentMode::kOptimal) return HierarchyConfig::optimal(n, h, rates_for(spec, h));
  HierarchyConfig cfg;
  cfg.n = n;
  cfg.h = h;
  cfg.a = spec.a;
  cfg.b = spec.b;
  cfg.rates = rates_for(spec, h);
  cfg.validate();
  return cfg;
}

std::vector<std::pair<double, int>> sweep_points(const SweepSpec& spec) {
  std::vector<std::pair<double, int>> points;
  for (int h : spec.h_values) {
    for (double n : spec.n_values) points.emplace_back(n, h);
  }
  return points;
}

std::string analytic_row(const SweepSpec& spec, double n, int h) {
  const auto cfg = config_for(spec, n, h);
  const auto moments = phase_moments(cfg, spec.moments);
  const double delta = average_age_from_moments(moments);
  const auto total = moments.total();
  const double predicted = h <= 1 ? growth_exponent(h, cfg.a, cfg.b) : alpha(h).value();
  return join({num(n), std::to_string(h), h == 0 ? "" : num(cfg.a), num(cfg.b),
               moment_name(spec.moments), num(delta), num(moments.phase1().mean),
               num(moments.phase2().mean), num(moments.phase3().mean), num(total.mean),
               num(total.second_moment), num(predicted)});
}

std::string simulate_row(const SweepSpec& spec, double n, int h) {
  if (h > 1) throw std::invalid_argument("simulate reports analytic columns for h <= 1 only");
  const auto cfg = config_for(spec, n, h);
  ExperimentOptions opts;
  opts.trials = spec.trials;
  opts.seed = spec.seed;
  opts.variant = spec.variant;
  const auto result = run_experiment(cfg, opts);
  const auto plan = cfg.count_plan();
  const auto analytic = phase_moments_exact(plan, cfg.rates);
  return join({num(n), std::to_string(h), h == 0 ? "" : num(cfg.a), num(cfg.b),
               to_string(spec.variant), std::to_string(spec.trials), std::to_string(spec.seed),
               std::to_string(plan.cells), std::to_string(plan.nodes_per_cell),
               std::to_string(plan.subcells_per_cell), std::to_string(plan.nodes_per_subcell),
               num(result.age.mean_age), num(result.age.half_width), num(result.phases[0].mean),
               num(result.phases[0].second_moment), num(result.phases[1].mean),
               num(result.phases[1].second_moment), num(result.phases[2].mean),
               num(result.phases[2].second_moment), num(result.session.mean),
               num(result.session_std_error), num(average_age_from_moments(analytic)),
               num(analytic.phase1().mean), num(analytic.phase2().mean),
               num(analytic.phase3().mean)});
}

std::string optimize_row(int h, const LinkRates& rates) {
  const auto choice = optimize_exponents(h, 1e6, rates);
  return join({std::to_string(h), choice.a ? num(*choice.a) : "", num(choice.b),
               num(choice.exponent), num(alpha(h).value())});
}

std::vector<std::string> sweep_rows(const SweepSpec& spec, bool simulate) {
  spec.validate(simulate);
  const auto points = sweep_points(spec);
  std::vector<std::string> rows(points.size());
  for_each_parallel(points.size(), [&](std::size_t i) {
    const auto [n, h] = points[i];
    rows[i] = simulate ? simulate_row(spec, n, h) : analytic_row(spec, n, h);
  });
  return rows;
}

DepthFit fit_slope(int h, const std::vector<double>& n_values, const std::vector<double>& ages) {
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const double ln_n = std::log(n_values[i]);
    x.push_back(ln_n);
    y.push_back(std::log(ages[i] / ln_n));
  }
  DepthFit out;
  out.h = h;
  out.points = x.size();
  out.fit = stats::ols_fit(x, y);
  out.predicted_exponent = h <= 1 ? optimize_exponents(h, 1e6, LinkRates::uniform(h)).exponent
                                  : alpha(h).value();
  return out;
}

std::vector<DepthFit> fit_slopes(const SweepSpec& spec, bool simulate) {
  spec.validate(simulate);
  std::vector<DepthFit> fits;
  for (int h : spec.h_values) {
    std::vector<double> ages(spec.n_values.size());
    for_each_parallel(spec.n_values.size(), [&](std::size_t i) {
      const auto cfg = config_for(spec, spec.n_values[i], h);
      if (simulate) {
        ExperimentOptions opts;
        opts.trials = spec.trials;
        opts.seed = spec.seed;
        opts.variant = spec.variant;
        ages[i] = run_experiment(cfg, opts).age.mean_age;
      } else {
        ages[i] = average_age_analytic(cfg, spec.moments);
      }
    });
    fits.push_back(fit_slope(h, spec.n_values, ages));
  }
  return fits;
}

// ---- command line ---------------------------------------------------------

namespace {

struct Flags {
  std::string config;
  std::vector<double> n;
  std::vector<int> h;
  std::string mode;
  double a = 0.0;
  double b = 0.0;
  double lambda0 = 1.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string moments;
  std::string variant;

  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

void add_common(CLI::App& cmd, Flags& f, bool with_sim) {
  cmd.set_help_flag("--help", "print this help and exit");
  f.opts["config"] = cmd.add_option("--config", f.config, "JSON config file (flat object)");
  f.opts["n"] = cmd.add_option("--n", f.n, "network sizes")->delimiter(',');
  f.opts["h"] = cmd.add_option("--h", f.h, "hierarchy depths")->delimiter(',');
  f.opts["mode"] = cmd.add_option("--mode", f.mode, "exponent mode: optimal | fixed");
  f.opts["a"] = cmd.add_option("--a", f.a, "subcell exponent (fixed mode)");
  f.opts["b"] = cmd.add_option("--b", f.b, "cell exponent (fixed mode)");
  f.opts["lambda0"] = cmd.add_option("--lambda0", f.lambda0, "inter-cell delay rate");
  f.opts["lambda1"] = cmd.add_option("--lambda1", f.lambda1, "inter-subcell delay rate");
  f.opts["lambda2"] = cmd.add_option("--lambda2", f.lambda2, "intra-subcell delay rate");
  f.opts["moments"] = cmd.add_option("--moments", f.moments, "analytic moments: large-n | exact");
  f.opts["out"] = cmd.add_option("--out", f.out, "CSV output path (default stdout)");
  if (with_sim) {
    f.opts["trials"] = cmd.add_option("--trials", f.trials, "sessions per point (>= 100)");
    f.opts["seed"] = cmd.add_option("--seed", f.seed, "RNG seed (falls back to AOI_SEED)");
    f.opts["variant"] = cmd.add_option("--variant", f.variant, "session variant: bounded | exact");
  }
}

template <typename T>
std::vector<T> scalar_or_list(const nlohmann::json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

SweepSpec build_spec(const Flags& f, MomentMode default_moments) {
  SweepSpec spec;
  spec.moments = default_moments;
  bool seed_set = false;

  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw std::invalid_argument("cannot open config file " + f.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a flat JSON object");
    try {
      for (const auto& [key, value] : j.items()) {
        if (key == "n") spec.n_values = scalar_or_list<double>(value);
        else if (key == "h") spec.h_values = scalar_or_list<int>(value);
        else if (key == "mode") spec.mode = parse_mode(value.get<std::string>());
        else if (key == "a") spec.a = value.get<double>();
        else if (key == "b") spec.b = value.get<double>();
        else if (key == "lambda0") spec.lambdas[0] = value.get<double>();
        else if (key == "lambda1") spec.lambdas[1] = value.get<double>();
        else if (key == "lambda2") spec.lambdas[2] = value.get<double>();
        else if (key == "trials") spec.trials = value.get<std::size_t>();
        else if (key == "seed") { spec.seed = value.get<std::uint64_t>(); seed_set = true; }
        else if (key == "out") spec.out = value.get<std::string>();
        else if (key == "moments") spec.moments = parse_moments(value.get<std::string>());
        else if (key == "variant") spec.variant = parse_variant(value.get<std::string>());
        else throw std::invalid_argument("config: unknown key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("config: ") + e.what());
    }
  }

  if (f.given("n")) spec.n_values = f.n;
  if (f.given("h")) spec.h_values = f.h;
  if (f.given("mode")) spec.mode = parse_mode(f.mode);
  if (f.given("a")) spec.a = f.a;
  if (f.given("b")) spec.b = f.b;
  if (f.given("a") || f.given("b")) {
    if (!f.given("mode")) spec.mode = ExponentMode::kFixed;
  }
  if (f.given("lambda0")) spec.lambdas[0] = f.lambda0;
  if (f.given("lambda1")) spec.lambdas[1] = f.lambda1;
  if (f.given("lambda2")) spec.lambdas[2] = f.lambda2;
  if (f.given("trials")) spec.trials = f.trials;
  if (f.given("seed")) {
    spec.seed = f.seed;
    seed_set = true;
  }
  if (f.given("out")) spec.out = f.out;
  if (f.given("moments")) spec.moments = parse_moments(f.moments);
  if (f.given("variant")) spec.variant = parse_variant(f.variant);

  if (!seed_set) {
    if (const char* env = std::getenv("AOI_SEED"); env && *env) {
      try {
        spec.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw std::invalid_argument(std::string("AOI_SEED is not an unsigned integer: ") + env);
      }
    }
  }
  return spec;
}

// Writes to the configured path or to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot open output file " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void write_rows(std::ostream& os, const char* header, const std::vector<std::string>& rows) {
  os << header << '\n';
  for (const auto& r : rows) os << r << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Age-of-information analytic engine and session simulator", "aoi_cli"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help and exit");

  Flags analytic_f, simulate_f, sweep_f, optimize_f;
  auto* analytic = app.add_subcommand("analytic", "closed-form average age per (n, h) point");
  add_common(*analytic, analytic_f, false);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo sessions with analytic columns");
  add_common(*simulate, simulate_f, true);

  auto* sweep = app.add_subcommand("sweep", "n x h grid with per-depth slope fits");
  add_common(*sweep, sweep_f, true);
  bool sweep_simulate = false;
  std::string fit_out;
  sweep->add_flag("--simulate", sweep_simulate, "simulate instead of evaluating closed forms");
  sweep->add_option("--fit-out", fit_out, "CSV path for the slope fits");

  auto* optimize = app.add_subcommand("optimize", "exponents minimizing the age growth exponent");
  add_common(*optimize, optimize_f, false);

  auto* tdma = app.add_subcommand("validate-tdma", "9-TDMA feasibility under the protocol model");
  tdma->set_help_flag("--help", "print this help and exit");
  std::vector<std::int64_t> grids{6};
  double gamma = std::sqrt(2.0) - 1.0 - 1e-6;
  bool actual = false;
  std::size_t nodes = 1000;
  std::int64_t subcells = 1;
  std::string level = "cell";
  std::string network_csv;
  std::string violations_out;
  std::string tdma_out;
  std::uint64_t tdma_seed = 1;
  tdma->add_option("--grid", grids, "cells per side")->delimiter(',');
  tdma->add_option("--gamma", gamma, "guard-zone constant");
  tdma->add_flag("--actual", actual, "use node positions instead of the worst-case geometry");
  tdma->add_option("--nodes", nodes, "nodes in the generated network (--actual)");
  tdma->add_option("--subcells", subcells, "subcells per cell side");
  tdma->add_option("--level", level, "cell | subcell");
  tdma->add_option("--network", network_csv, "node CSV (node_id,x,y,dest_id) on the unit square");
  auto* tdma_seed_opt = tdma->add_option("--seed", tdma_seed, "seed for the generated network");
  tdma->add_option("--violations", violations_out, "CSV path listing every violation");
  tdma->add_option("--out", tdma_out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidConfig;
  }

  try {
    if (*analytic) {
      const auto spec = build_spec(analytic_f, MomentMode::kLargeN);
      const auto rows = sweep_rows(spec, false);
      Sink sink(spec.out, out);
      write_rows(*sink, kAnalyticHeader, rows);
    } else if (*simulate) {
      const auto spec = build_spec(simulate_f, MomentMode::kExact);
      const auto rows = sweep_rows(spec, true);
      Sink sink(spec.out, out);
      write_rows(*sink, kSimulateHeader, rows);
    } else if (*sweep) {
      const auto spec = build_spec(sweep_f, MomentMode::kLargeN);
      const auto rows = sweep_rows(spec, sweep_simulate);
      {
        Sink sink(spec.out, out);
        write_rows(*sink, sweep_simulate ? kSimulateHeader : kAnalyticHeader, rows);
      }
      if (spec.n_values.size() >= 4) {
        const auto fits = fit_slopes(spec, sweep_simulate);
        std::vector<std::string> fit_rows;
        for (const auto& f : fits) {
          fit_rows.push_back(join({std::to_string(f.h), std::to_string(f.points),
                                   num(f.fit.slope), num(f.fit.intercept), num(f.fit.r_squared),
                                   num(f.predicted_exponent)}));
          err << "h=" << f.h << " slope=" << num(f.fit.slope)
              << " predicted=" << num(f.predicted_exponent) << " r2=" << num(f.fit.r_squared)
              << '\n';
        }
        if (!fit_out.empty()) {
          Sink fit_sink(fit_out, out);
          write_rows(*fit_sink, kFitHeader, fit_rows);
        }
      } else if (!fit_out.empty()) {
        throw std::invalid_argument("slope fits need at least 4 n values");
      }
    } else if (*optimize) {
      const auto spec = build_spec(optimize_f, MomentMode::kLargeN);
      std::vector<std::string> rows;
      for (int h : spec.h_values) {
        if (h < 0) throw std::invalid_argument("h values must be >= 0");
        rows.push_back(optimize_row(h, rates_for(spec, h)));
      }
      Sink sink(spec.out, out);
      write_rows(*sink, kOptimizeHeader, rows);
    } else if (*tdma) {
      if (level != "cell" && level != "subcell") {
        throw std::invalid_argument("level must be 'cell' or 'subcell'");
      }
      if (!tdma_seed_opt->count()) {
        if (const char* env = std::getenv("AOI_SEED"); env && *env) tdma_seed = std::stoull(env);
      }
      const auto lvl = level == "subcell" ? geo::TdmaLevel::kSubcell : geo::TdmaLevel::kCell;
      std::vector<std::string> rows;
      std::vector<std::string> violation_rows;
      bool all_feasible = true;
      for (std::int64_t g : grids) {
        if (g < 1) throw std::invalid_argument("grid side must be >= 1");
        const geo::GridSpec spec{g, subcells};
        geo::Network net;
        if (!network_csv.empty()) {
          std::ifstream in(network_csv);
          if (!in) throw std::invalid_argument("cannot open network file " + network_csv);
          net = geo::read_network_csv(in, 1.0, spec);
        } else if (actual) {
          RngStream rng = make_stream(tdma_seed, static_cast<std::uint64_t>(g));
          net = geo::generate_network(nodes, 1.0, spec, rng);
        } else {
          net.grid = spec;
        }
        const bool worst = network_csv.empty() && !actual;
        const auto v = geo::validate_tdma_against_protocol(net, gamma, worst, lvl);
        all_feasible = all_feasible && v.feasible;
        for (int s = 0; s < 9; ++s) {
          const auto si = static_cast<std::size_t>(s);
          rows.push_back(join({std::to_string(v.grid_side), num(gamma), worst ? "1" : "0",
                               std::to_string(s), std::to_string(v.active_cells[si]),
                               std::to_string(v.slot_violations[si]),
                               v.slot_violations[si] == 0 ? "PASS" : "FAIL"}));
        }
        for (const auto& viol : v.violations) {
          violation_rows.push_back(
              join({std::to_string(v.grid_side), std::to_string(viol.slot),
                    std::to_string(viol.victim_cell.row), std::to_string(viol.victim_cell.col),
                    std::to_string(viol.interferer_cell.row),
                    std::to_string(viol.interferer_cell.col), num(viol.intended_distance),
                    num(viol.interferer_distance)}));
        }
        err << "grid " << v.grid_side << ": " << (v.feasible ? "PASS" : "FAIL") << " ("
            << v.violations.size() << " violations)\n";
      }
      {
        Sink sink(tdma_out, out);
        write_rows(*sink, kTdmaHeader, rows);
      }
      if (!violations_out.empty()) {
        Sink vs(violations_out, out);
        write_rows(*vs,
                   "grid_side,slot,victim_row,victim_col,interferer_row,interferer_col,"
                   "intended_distance,interferer_distance",
                   violation_rows);
      }
      err << "verdict: " << (all_feasible ? "PASS" : "FAIL") << '\n';
    }
  } catch (const NumericFailure& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::domain_error& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  }
  return kOk;
}

}  // namespace aoi::cli
