#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "aoi/age_renewal.hpp"
#include "aoi/rng.hpp"
#include "aoi/stats.hpp"

using aoi::MomentPair;
using aoi::SessionTrace;

namespace {

// Independent oracle: integrate t - g(t) between consecutive deliveries,
// where g is the generation time of the freshest delivered update.
double sawtooth_oracle(const std::vector<double>& y, const std::vector<double>& d) {
  std::vector<double> gen(y.size());
  std::vector<double> del(y.size());
  double t = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    gen[j] = t;
    del[j] = t + d[j];
    t += y[j];
  }
  double area = 0.0;
  for (std::size_t j = 0; j + 1 < y.size(); ++j) {
    const double a = del[j] - gen[j];
    const double b = del[j + 1] - gen[j];
    area += 0.5 * (b * b - a * a);
  }
  return area / (del.back() - del.front());
}

std::vector<double> exp_sessions(std::size_t n, std::uint64_t seed) {
  auto rng = aoi::make_stream(seed, 0);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> ys(n);
  for (auto& y : ys) y = ex(rng);
  return ys;
}

}  // namespace

TEST_CASE("renewal formula: worked values") {
  CHECK(aoi::average_age_formula(MomentPair{1.0, 1.0}, 1.0) == doctest::Approx(1.5));
  CHECK(aoi::average_age_formula(MomentPair{1.0, 2.0}, 1.0) == doctest::Approx(2.0));
  CHECK(aoi::average_age_formula(MomentPair{2.0, 5.0}, 2.0) == doctest::Approx(3.25));
  CHECK(aoi::average_age_session_end(MomentPair{1.0, 1.0}) == doctest::Approx(1.5));
  CHECK(aoi::average_age_session_end(MomentPair{1.0, 2.0}) == doctest::Approx(2.0));
  CHECK(aoi::average_age_session_end(MomentPair{2.0, 5.0}) == doctest::Approx(3.25));
}

TEST_CASE("renewal formula rejects impossible moment pairs") {
  CHECK_THROWS_AS(aoi::average_age_formula(MomentPair{0.0, 1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(aoi::average_age_formula(MomentPair{-1.0, 1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(aoi::average_age_formula(MomentPair{2.0, 3.9}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(aoi::average_age_session_end(MomentPair{1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("session-end age is at least 1.5 E[Y], with equality only when deterministic") {
  // Uniform(0, 2c): E = c, E[Y^2] = 4c^2/3.  Gamma(k, 1): E = k, E[Y^2] = k + k^2.
  for (double c : {0.1, 1.0, 7.0}) {
    CHECK(aoi::average_age_session_end(MomentPair::deterministic(c)) == doctest::Approx(1.5 * c));
    CHECK(aoi::average_age_session_end(MomentPair{c, 4.0 * c * c / 3.0}) > 1.5 * c);
  }
  for (double k : {0.5, 1.0, 4.0, 100.0}) {
    const double age = aoi::average_age_session_end(MomentPair{k, k + k * k});
    CHECK(age > 1.5 * k);
    CHECK(age == doctest::Approx(1.5 * k + 0.5));
  }
}

TEST_CASE("trace time-average: hand-integrated cycles") {
  CHECK(aoi::time_average_from_trace(SessionTrace{{1.0, 1.0, 1.0}, {}}).mean_age ==
        doctest::Approx(1.5));
  const auto est = aoi::time_average_from_trace(SessionTrace{{1.0, 3.0}, {}});
  CHECK(est.mean_age == doctest::Approx(2.5));
  CHECK(est.half_width >= 0.0);
}

TEST_CASE("trace validation") {
  CHECK_THROWS_AS(aoi::time_average_from_trace(SessionTrace{{1.0}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(aoi::time_average_from_trace(SessionTrace{{1.0, 0.0}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(aoi::time_average_from_trace(SessionTrace{{1.0, 2.0}, std::vector<double>{1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      aoi::time_average_from_trace(SessionTrace{{1.0, 2.0}, std::vector<double>{1.5, 1.0}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      aoi::time_average_from_trace(SessionTrace{{1.0, 2.0}, std::vector<double>{0.0, 1.0}}),
      std::invalid_argument);
}

TEST_CASE("trace time-average matches an independent sawtooth integration") {
  const auto ys = exp_sessions(5000, 3);
  CHECK(aoi::time_average_from_trace(SessionTrace{ys, {}}).mean_age ==
        doctest::Approx(sawtooth_oracle(ys, ys)).epsilon(1e-10));

  auto rng = aoi::make_stream(4, 0);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> ds(ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j) ds[j] = u(rng) * ys[j];
  const auto with_offsets = aoi::time_average_from_trace(SessionTrace{ys, ds});
  CHECK(with_offsets.mean_age == doctest::Approx(sawtooth_oracle(ys, ds)).epsilon(1e-10));
  // Earlier deliveries never hurt.
  CHECK(with_offsets.mean_age < aoi::time_average_from_trace(SessionTrace{ys, {}}).mean_age);
  // Offsets equal to the durations reproduce the session-end mode.
  CHECK(aoi::time_average_from_trace(SessionTrace{ys, ys}).mean_age ==
        doctest::Approx(aoi::time_average_from_trace(SessionTrace{ys, {}}).mean_age).epsilon(1e-12));
}

TEST_CASE("trace time-average converges for exponential sessions") {
  const auto est = aoi::time_average_from_trace(SessionTrace{exp_sessions(100'000, 7), {}});
  CHECK(est.mean_age == doctest::Approx(2.0).epsilon(0.01));
  CHECK(est.sessions_used == 100'000);
  CHECK(std::abs(est.mean_age - 2.0) <= 2.0 * est.half_width);
}

TEST_CASE("trace time-average converges for a two-point distribution") {
  auto rng = aoi::make_stream(8, 0);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> ys(100'000);
  for (auto& y : ys) y = coin(rng) ? 3.0 : 1.0;
  const auto est = aoi::time_average_from_trace(SessionTrace{ys, {}});
  CHECK(est.mean_age == doctest::Approx(3.25).epsilon(0.01));
}

TEST_CASE("trace time-average is scale equivariant") {
  const auto ys = exp_sessions(2000, 9);
  const double base = aoi::time_average_from_trace(SessionTrace{ys, {}}).mean_age;
  for (double c : {0.01, 3.0, 1000.0}) {
    std::vector<double> scaled(ys);
    for (auto& y : scaled) y *= c;
    CHECK(aoi::time_average_from_trace(SessionTrace{scaled, {}}).mean_age ==
          doctest::Approx(c * base).epsilon(1e-12));
  }
}

TEST_CASE("batch-means ratio and t quantiles") {
  CHECK(aoi::stats::t_critical(99) == doctest::Approx(1.984217).epsilon(1e-6));
  CHECK(aoi::stats::t_critical(1000000) == doctest::Approx(1.959966).epsilon(1e-5));
  std::vector<double> num(1000, 2.0);
  std::vector<double> den(1000, 1.0);
  const auto r = aoi::stats::batch_ratio(num, den);
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.half_width == doctest::Approx(0.0));
  CHECK(r.batches == 100);
}

TEST_CASE("least-squares fit recovers an exact line") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> y;
  for (double v : x) y.push_back(0.25 * v - 3.0);
  const auto fit = aoi::stats::ols_fit(x, y);
  CHECK(fit.slope == doctest::Approx(0.25));
  CHECK(fit.intercept == doctest::Approx(-3.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK_THROWS(aoi::stats::ols_fit(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}));
}
