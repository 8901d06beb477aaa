#include "aoi/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "aoi/age_renewal.hpp"
#include "aoi/order_stats.hpp"

namespace aoi {

// ---- Rational -------------------------------------------------------------

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& x, const Rational& y) {
  return {x.num_ * y.den_ + y.num_ * x.den_, x.den_ * y.den_};
}
Rational operator-(const Rational& x, const Rational& y) {
  return {x.num_ * y.den_ - y.num_ * x.den_, x.den_ * y.den_};
}
Rational operator*(const Rational& x, const Rational& y) {
  return {x.num_ * y.num_, x.den_ * y.den_};
}
Rational operator/(const Rational& x, const Rational& y) {
  return {x.num_ * y.den_, x.den_ * y.num_};
}
std::strong_ordering operator<=>(const Rational& x, const Rational& y) {
  return x.num_ * y.den_ <=> y.num_ * x.den_;
}

Rational alpha(int h) {
  if (h < 0 || h > 40) throw std::invalid_argument("alpha: depth must be in [0, 40]");
  return {1, 3 * (std::int64_t{1} << h) + 1};
}

std::vector<Rational> general_h_exponent_schedule(int h) {
  const Rational top = Rational{std::int64_t{1} << h} * alpha(h);
  std::vector<Rational> schedule;
  schedule.reserve(static_cast<std::size_t>(h) + 1);
  for (int level = 0; level <= h; ++level) {
    schedule.push_back(top / Rational{std::int64_t{1} << level});
  }
  return schedule;
}

// ---- HierarchyConfig ------------------------------------------------------

void HierarchyConfig::validate() const {
  if (!(n >= 1.0) || !std::isfinite(n)) throw std::invalid_argument("n must be finite and >= 1");
  if (h < 0) throw std::invalid_argument("hierarchy depth must be >= 0");
  if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument("need 0 < b <= 1");
  if (h >= 1 && !(a > 0.0 && a < b)) throw std::invalid_argument("need 0 < a < b");
  rates.validate(h);
}

std::vector<double> HierarchyConfig::exponent_schedule() const {
  std::vector<double> out{b};
  for (int level = 1; level <= h; ++level) out.push_back(b * std::pow(a / b, level));
  return out;
}

CountPlan HierarchyConfig::count_plan() const {
  validate();
  return make_count_plan(n, h, a, b);
}

LevelPlan HierarchyConfig::level_plan() const {
  validate();
  const auto exps = exponent_schedule();
  return make_level_plan(n, exps);
}

HierarchyConfig HierarchyConfig::optimal(double n, int h, LinkRates rates) {
  const auto choice = optimize_exponents(h, n, rates);
  HierarchyConfig cfg;
  cfg.n = n;
  cfg.h = h;
  cfg.b = choice.b;
  cfg.a = choice.a.value_or(choice.b / 2.0);
  cfg.rates = std::move(rates);
  cfg.validate();
  return cfg;
}

// ---- PhaseMoments ---------------------------------------------------------

std::array<MomentPair, 7> PhaseMoments::terms() const {
  return {v1_i, v1_ii, v1_iii_prime, y_ii, v3_i, v3_ii, v3_iii};
}

MomentPair& PhaseMoments::term(std::size_t i) {
  switch (i) {
    case 0: return v1_i;
    case 1: return v1_ii;
    case 2: return v1_iii_prime;
    case 3: return y_ii;
    case 4: return v3_i;
    case 5: return v3_ii;
    case 6: return v3_iii;
    default: throw std::out_of_range("PhaseMoments::term");
  }
}

MomentPair PhaseMoments::phase1() const { return sum_independent({v1_i, v1_ii, v1_iii_prime}); }
MomentPair PhaseMoments::phase3() const { return sum_independent({v3_i, v3_ii, v3_iii}); }

MomentPair PhaseMoments::total() const {
  const auto t = terms();
  return sum_independent(std::vector<MomentPair>(t.begin(), t.end()));
}

namespace {

constexpr double kZeta2 = std::numbers::pi * std::numbers::pi / 6.0;

void require_closed_form_depth(const HierarchyConfig& cfg) {
  cfg.validate();
  if (cfg.h > 1) {
    throw std::invalid_argument("closed-form phase moments exist for h = 0 and h = 1 only");
  }
}

// `count` i.i.d. copies of a variable with the given mean and variance.
MomentPair repeated(double count, double mean, double variance) {
  const double total = count * mean;
  return {total, count * variance + total * total};
}

}  // namespace

PhaseMoments phase_moments_approx(const HierarchyConfig& cfg) {
  require_closed_form_depth(cfg);
  const double n = cfg.n;
  const double a = cfg.a;
  const double b = cfg.b;
  const double ln = std::log(n);
  const double ln2 = ln * ln;
  const double l0 = cfg.rates.at(0);
  PhaseMoments m;

  m.y_ii.mean = b * std::pow(n, 1.0 - 3.0 * b) / l0 * ln;
  m.y_ii.second_moment = std::pow(n, 1.0 - 5.0 * b) / (l0 * l0) * kZeta2 +
                         b * b * std::pow(n, 2.0 * (1.0 - 3.0 * b)) / (l0 * l0) * ln2;

  if (cfg.h == 0) {
    // Cells of n^b nodes exchange and relay by TDMA at the in-cell rate.
    const double l1 = cfg.rates.at(1);
    m.v1_i.mean = std::pow(n, b) / l1 * ln;
    m.v1_i.second_moment =
        std::pow(n, b) / (l1 * l1) * kZeta2 + std::pow(n, 2.0 * b) / (l1 * l1) * ln2;
    m.v3_iii.mean = (1.0 - b) * std::pow(n, b) / l1 * ln;
    m.v3_iii.second_moment = std::pow(n, b) / (l1 * l1) * kZeta2 +
                             (1.0 - b) * (1.0 - b) * std::pow(n, 2.0 * b) / (l1 * l1) * ln2;
    return m;
  }

  const double l1 = cfg.rates.at(1);
  const double l2 = cfg.rates.at(2);
  const double l1sq = l1 * l1;
  const double l2sq = l2 * l2;

  m.v1_i.mean = std::pow(n, a) / l2 * ln;
  m.v1_i.second_moment = std::pow(n, a) / l2sq * kZeta2 + std::pow(n, 2.0 * a) / l2sq * ln2;

  m.v1_ii.mean = (1.0 - a) * std::pow(n, b - 3.0 * a) / l1 * ln;
  m.v1_ii.second_moment = std::pow(n, b - 5.0 * a) / l1sq * kZeta2 +
                          (1.0 - a) * (1.0 - a) * std::pow(n, 2.0 * (b - 3.0 * a)) / l1sq * ln2;

  m.v1_iii_prime.mean = std::pow(n, b - a) / l2 * ln;
  m.v1_iii_prime.second_moment =
      std::pow(n, b - a) / l2sq * kZeta2 + std::pow(n, 2.0 * (b - a)) / l2sq * ln2;

  m.v3_i.mean = std::pow(n, a) / l2 * ln;
  m.v3_i.second_moment = std::pow(n, a) / l2sq * kZeta2 + std::pow(n, 2.0 * a) / l2sq * ln2;

  const double c3 = 1.0 - b + a;
  m.v3_ii.mean = c3 * std::pow(n, b - 3.0 * a) / l1 * ln;
  m.v3_ii.second_moment = std::pow(n, b - 5.0 * a) / l1sq * kZeta2 +
                          c3 * c3 * std::pow(n, 2.0 * (b - 3.0 * a)) / l1sq * ln2;

  m.v3_iii.mean = (1.0 - a) * std::pow(n, a) / l2 * ln;
  m.v3_iii.second_moment = std::pow(n, a) / l2sq * kZeta2 +
                           (1.0 - a) * (1.0 - a) * std::pow(n, 2.0 * a) / l2sq * ln2;
  return m;
}

double grouped_phase1_mean_approx(const HierarchyConfig& cfg) {
  require_closed_form_depth(cfg);
  const double n = cfg.n;
  if (cfg.h == 0) return std::pow(n, cfg.b) / cfg.rates.at(1) * std::log(n);
  const double a = cfg.a;
  const double b = cfg.b;
  return ((std::pow(n, a) + std::pow(n, b - a)) / cfg.rates.at(2) +
          (1.0 - a) * std::pow(n, b - 3.0 * a) / cfg.rates.at(1)) *
         std::log(n);
}

double grouped_phase3_mean_approx(const HierarchyConfig& cfg) {
  require_closed_form_depth(cfg);
  const double n = cfg.n;
  if (cfg.h == 0) return (1.0 - cfg.b) * std::pow(n, cfg.b) / cfg.rates.at(1) * std::log(n);
  const double a = cfg.a;
  const double b = cfg.b;
  return ((2.0 - a) * std::pow(n, a) / cfg.rates.at(2) +
          (1.0 - b + a) * std::pow(n, b - 3.0 * a) / cfg.rates.at(1)) *
         std::log(n);
}

namespace {

// `count` rounds of the max of `k` i.i.d. Exp(rate) variables.
MomentPair rounds_of_max(std::int64_t count, std::int64_t k, double rate) {
  const OrderStatSpec spec{k, k, rate};
  return repeated(static_cast<double>(count), expected_order_stat(spec), variance_order_stat(spec));
}

}  // namespace

PhaseMoments phase_moments_exact(const CountPlan& plan, const LinkRates& rates) {
  plan.validate();
  rates.validate(plan.depth);
  const std::int64_t total = plan.total_nodes();
  const std::int64_t cell_nodes = plan.nodes_per_cell;
  PhaseMoments m;

  // Min over cell_nodes^2 links is Exp(cell_nodes^2 * rate0).
  m.y_ii = rounds_of_max(plan.cells, cell_nodes,
                         rates.at(0) * static_cast<double>(cell_nodes * cell_nodes));

  if (plan.depth == 0) {
    m.v1_i = rounds_of_max(cell_nodes, total, rates.at(1));
    m.v3_iii = rounds_of_max(cell_nodes, plan.cells, rates.at(1));
    return m;
  }

  const std::int64_t sub_nodes = plan.nodes_per_subcell;
  const std::int64_t subcells = plan.subcells_per_cell;
  const double mimo_rate = rates.at(1) * static_cast<double>(sub_nodes * sub_nodes);
  const double l2 = rates.at(2);

  m.v1_i = rounds_of_max(sub_nodes, total, l2);
  m.v1_ii = rounds_of_max(subcells, plan.total_subcells(), mimo_rate);
  m.v1_iii_prime = rounds_of_max(subcells, total, l2);
  m.v3_i = rounds_of_max(sub_nodes, total, l2);
  m.v3_ii = rounds_of_max(subcells, plan.cells * sub_nodes, mimo_rate);
  m.v3_iii = rounds_of_max(sub_nodes, plan.total_subcells(), l2);
  return m;
}

PhaseMoments phase_moments(const HierarchyConfig& cfg, MomentMode mode) {
  if (mode == MomentMode::kLargeN) return phase_moments_approx(cfg);
  require_closed_form_depth(cfg);
  return phase_moments_exact(cfg.count_plan(), cfg.rates);
}

double exact_mimo_phase_mean(const CountPlan& plan, double rate0) {
  plan.validate();
  if (!(rate0 > 0.0)) throw std::invalid_argument("rate must be positive");
  const double m = static_cast<double>(plan.nodes_per_cell);
  return static_cast<double>(plan.cells) * harmonic(plan.nodes_per_cell) / (rate0 * m * m);
}

double exact_mimo_phase_mean(const HierarchyConfig& cfg) {
  cfg.validate();
  const double exps[] = {cfg.b};
  const auto lp = make_level_plan(cfg.n, exps);
  CountPlan plan;
  plan.depth = 0;
  plan.cells = lp.cells;
  plan.nodes_per_cell = plan.nodes_per_subcell = lp.unit_nodes[0];
  return exact_mimo_phase_mean(plan, cfg.rates.at(0));
}

double average_age_from_moments(const PhaseMoments& moments, std::optional<double> mean_delay) {
  for (const auto& t : moments.terms()) {
    if (!t.coherent(1e-9)) throw std::domain_error("incoherent phase moment pair");
  }
  const MomentPair y = moments.total();
  return mean_delay ? average_age_formula(y, *mean_delay) : average_age_session_end(y);
}

double average_age_analytic(const HierarchyConfig& cfg, MomentMode mode,
                            std::optional<double> mean_delay) {
  return average_age_from_moments(phase_moments(cfg, mode), mean_delay);
}

// ---- exponent optimization ------------------------------------------------

double growth_exponent(int h, double a, double b) {
  if (h == 0) return std::max(b, 1.0 - 3.0 * b);
  if (h == 1) return std::max({a, b - a, b - 3.0 * a, 1.0 - 3.0 * b});
  throw std::invalid_argument("growth_exponent: closed form for h <= 1 only");
}

namespace {

struct GridResult {
  double a = 0.0;
  double b = 0.0;
  double value = std::numeric_limits<double>::infinity();
};

// Scan a box with the given step, keeping the first strict minimum.
GridResult scan(int h, double a_lo, double a_hi, double b_lo, double b_hi, double step) {
  GridResult best;
  for (double b = b_lo; b <= b_hi + 1e-15; b += step) {
    if (b <= 0.0 || b > 1.0) continue;
    if (h == 0) {
      const double v = growth_exponent(0, 0.0, b);
      if (v < best.value) best = {0.0, b, v};
      continue;
    }
    for (double a = a_lo; a <= a_hi + 1e-15; a += step) {
      if (a <= 0.0 || a >= b) continue;
      const double v = growth_exponent(1, a, b);
      if (v < best.value) best = {a, b, v};
    }
  }
  return best;
}

}  // namespace

ExponentChoice optimize_exponents(int h, double n, const LinkRates& rates) {
  if (h < 0) throw std::invalid_argument("hierarchy depth must be >= 0");
  if (!(n > 1.0)) throw std::invalid_argument("n must be > 1");
  rates.validate(h);

  ExponentChoice out;
  if (h >= 2) {
    const auto schedule = general_h_exponent_schedule(h);
    for (const auto& r : schedule) out.schedule.push_back(r.value());
    out.b = out.schedule[0];
    out.a = out.schedule[1];
    out.exponent = alpha(h).value();
    return out;
  }

  double step = 1.0 / 500.0;
  GridResult best = scan(h, 0.0, 1.0, 0.0, 1.0, step);
  for (int round = 0; round < 7; ++round) {
    const double span = 5.0 * step;
    step /= 10.0;
    best = scan(h, best.a - span, best.a + span, best.b - span, best.b + span, step);
  }
  out.b = best.b;
  out.exponent = best.value;
  out.schedule = {best.b};
  if (h == 1) {
    out.a = best.a;
    out.schedule.push_back(best.a);
  }
  return out;
}

}  // namespace aoi
