#include <cmath>

#include "doctest.h"
#include "dmtsim/analysis.hpp"

using namespace dmtsim;

namespace {

SystemConfig uplink(int interferers, std::vector<double> grid, std::int64_t trials) {
  SystemConfig c;
  c.M = 2;
  c.N = 4;
  c.num_interferers = interferers;
  c.xi = 0.5;
  c.snr_grid_db = std::move(grid);
  c.rate = FixedRate{5.0};
  c.trials_per_point = trials;
  c.seed = 42;
  return validated(c);
}

/// Synthetic curve p_out = f(SNR) with Wilson intervals for `trials` draws.
OutageCurve synthetic(const std::vector<double>& grid_db, double (*p_of_snr)(double),
                      std::int64_t trials) {
  OutageCurve curve;
  curve.config.M = 2;
  curve.config.N = 4;
  for (double db : grid_db) {
    OutagePoint p;
    p.snr_db = db;
    p.snr_linear = db_to_linear(db);
    p.p_out = p_of_snr(p.snr_linear);
    p.trials = trials;
    p.outages = static_cast<std::int64_t>(std::llround(p.p_out * trials));
    const auto ci = wilson_interval(p.outages, trials);
    p.ci_low = ci.low;
    p.ci_high = ci.high;
    curve.points.push_back(p);
  }
  return curve;
}

}  // namespace

TEST_CASE("wilson interval matches the reference implementation") {
  // Reference: statsmodels proportion_confint(method="wilson").
  auto ci = wilson_interval(10, 100);
  CHECK(ci.low == doctest::Approx(0.055229137060675088).epsilon(1e-12));
  CHECK(ci.high == doctest::Approx(0.17436566150491348).epsilon(1e-12));
  ci = wilson_interval(0, 1000);
  CHECK(ci.low == 0.0);
  CHECK(ci.high == doctest::Approx(0.0038267584855551252).epsilon(1e-12));
  ci = wilson_interval(1000, 1000);
  CHECK(ci.low == doctest::Approx(0.99617324151444497).epsilon(1e-12));
  CHECK(ci.high == 1.0);
  ci = wilson_interval(50, 1000000);
  CHECK(ci.low == doctest::Approx(3.7929424395395226e-05).epsilon(1e-10));
  CHECK(ci.high == doctest::Approx(6.5911635524143347e-05).epsilon(1e-10));
  CHECK_THROWS_AS(wilson_interval(5, 0), std::invalid_argument);
}

TEST_CASE("wilson interval brackets the estimate") {
  for (std::int64_t n : {1, 7, 100, 12345}) {
    for (std::int64_t k = 0; k <= n; k += std::max<std::int64_t>(1, n / 37)) {
      const auto ci = wilson_interval(k, n);
      const double p = static_cast<double>(k) / n;
      REQUIRE(ci.low <= p);
      REQUIRE(p <= ci.high);
      const auto mirror = wilson_interval(n - k, n);
      REQUIRE(ci.low == doctest::Approx(1.0 - mirror.high));
    }
  }
}

TEST_CASE("zero target rate never causes an outage") {
  auto c = uplink(3, {10.0, 20.0}, 2000);
  c.rate = ScalingRate{0.0};
  const auto p = estimate_outage(c, 10.0);
  CHECK(p.target_rate_bits == 0.0);
  CHECK(p.outages == 0);
  CHECK(p.p_out == 0.0);
  CHECK(p.trials == 2000);
}

TEST_CASE("scalar Rayleigh outage matches the closed form") {
  SystemConfig c;
  c.M = 1;
  c.N = 1;
  c.snr_grid_db = {5.0, 10.0, 15.0, 20.0, 25.0};
  c.rate = FixedRate{2.0};
  c.trials_per_point = 100000;
  c.seed = 9;
  c = validated(c);
  const auto curve = sweep_curve(c);
  for (const auto& p : curve.points) {
    const double oracle = 1.0 - std::exp(-(std::pow(2.0, 2.0) - 1.0) / p.snr_linear);
    // Binomial z-score: five points, so a 4-sigma gate rarely trips by chance.
    const double sigma = std::sqrt(oracle * (1.0 - oracle) / static_cast<double>(p.trials));
    CHECK_MESSAGE(std::abs(p.p_out - oracle) <= 4.0 * sigma,
                  p.snr_db << " dB: " << p.p_out << " vs " << oracle);
  }
}

TEST_CASE("more interferers raise the outage at fixed SNR") {
  const auto p1 = estimate_outage(uplink(1, {25.0}, 100000), 25.0);
  const auto p3 = estimate_outage(uplink(3, {25.0}, 100000), 25.0);
  const auto p6 = estimate_outage(uplink(6, {25.0}, 100000), 25.0);
  CHECK(p1.ci_high < p3.ci_low);
  CHECK(p3.ci_high < p6.ci_low);
}

TEST_CASE("parallel kernel agrees exactly with the serial reference") {
  const auto c = uplink(2, {15.0, 25.0}, 25000);
  for (int workers : {1, 3, 8}) {
    set_workers(workers);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto par = estimate_outage_at(c, i);
      const auto ser = estimate_outage_serial(c, i);
      CHECK(par.outages == ser.outages);
      CHECK(par.trials == ser.trials);
      CHECK(par.discarded == ser.discarded);
    }
  }
  set_workers(max_workers());
}

TEST_CASE("sweep is independent of the worker count") {
  const auto c = uplink(3, {15.0, 20.0, 25.0}, 20000);
  set_workers(1);
  const auto one = sweep_curve(c);
  set_workers(8);
  const auto eight = sweep_curve(c);
  REQUIRE(one.points.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(one.points[i].outages == eight.points[i].outages);
    CHECK(one.points[i].p_out == eight.points[i].p_out);
  }
  const auto serial = sweep_curve_serial(c);
  CHECK(serial.points[2].outages == eight.points[2].outages);
}

TEST_CASE("single-point grid") {
  const auto curve = sweep_curve(uplink(1, {20.0}, 1000));
  CHECK(curve.points.size() == 1);
}

TEST_CASE("outage is non-increasing in SNR") {
  const auto curve = sweep_curve(uplink(3, {15.0, 20.0, 25.0, 30.0, 35.0}, 20000));
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].ci_low <= curve.points[i - 1].ci_high);
  }
}

TEST_CASE("early stopping happens on batch boundaries only") {
  auto c = uplink(3, {15.0, 30.0}, 200000);
  c.target_outages = 500;
  set_workers(1);
  const auto a = sweep_curve(c);
  set_workers(5);
  const auto b = sweep_curve(c);
  set_workers(max_workers());
  CHECK(a.points[0].trials == kBatchSize);  // p_out ~ 0.6 crosses 500 in the first batch
  CHECK(a.points[0].trials == b.points[0].trials);
  CHECK(a.points[1].trials == b.points[1].trials);
  CHECK(a.points[1].outages == b.points[1].outages);
  CHECK(a.points[1].trials % kBatchSize == 0);
  CHECK(a.points[1].outages >= 500);
}

TEST_CASE("numerically hopeless SNR invalidates the run") {
  const auto c = uplink(1, {3000.0}, 1000);
  CHECK_THROWS_AS(estimate_outage(c, 3000.0), RunInvalid);
}

TEST_CASE("slope fit recovers an exact power law") {
  const std::vector<double> grid = {20, 22.5, 25, 27.5, 30, 32.5, 35};
  const auto curve = synthetic(grid, [](double snr) { return 100.0 * std::pow(snr, -1.5); },
                               100000000);
  const auto est = estimate_slope(curve);
  CHECK(est.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(est.stderr_ < 1e-10);
  CHECK(est.points_used == 7);
  CHECK(est.theoretical_d == 3.0);  // M = 2, N = 4, no interference
}

TEST_CASE("slope fit of a flat curve is zero") {
  const auto curve = synthetic({10, 20, 30, 40}, [](double) { return 0.01; }, 1000000);
  const auto est = estimate_slope(curve);
  CHECK(std::abs(est.slope) < 1e-12);
}

TEST_CASE("slope fit needs three qualifying points") {
  auto curve = synthetic({10, 20, 30, 40}, [](double snr) { return std::pow(snr, -1.0); },
                         1000000);
  // p_out = 0.1, 0.01, 0.001, 1e-4: all in the default window.
  CHECK(estimate_slope(curve).points_used == 4);
  CHECK(estimate_slope(curve, {1e-3, 1e-1, 50}).points_used == 3);
  CHECK_THROWS_AS(estimate_slope(curve, {1e-2, 1e-1, 50}), InsufficientPoints);
  // With 1e5 trials the 1e-3 point has 100 events and the 1e-4 point has 10.
  curve = synthetic({10, 20, 30, 40}, [](double snr) { return std::pow(snr, -1.0); }, 100000);
  CHECK(estimate_slope(curve, {1e-4, 1e-1, 50}).points_used == 3);
  CHECK_THROWS_AS(estimate_slope(curve, {1e-4, 1e-1, 200}), InsufficientPoints);
}

TEST_CASE("closed-form tradeoff values") {
  CHECK(dmt_theoretical(2, 4, 0.0, 0.5) == 1.5);
  CHECK(dmt_theoretical(2, 4, 1.0, 0.0) == 1.5);
  CHECK(dmt_theoretical(2, 4, 1.2, 0.5) == 0.0);
  CHECK(dmt_theoretical(3, 5, 3.0, 0.0) == 0.0);
  CHECK(dmt_p2p(2, 4, 0.0) == 3.0);
  CHECK(dmt_p2p(3, 3, 3.0) == 0.0);
  CHECK(dmt_p2p(1, 1, 0.0) == 1.0);
  CHECK(ml_dmt_reference(2, 4, 0) == 8.0);
  CHECK(ml_dmt_reference(2, 4, 2) == 0.0);
  CHECK(ml_dmt_reference(1, 1, 0) == 1.0);
  CHECK(ml_dmt_interpolated(2, 4, 1.0) == 3.0);
  CHECK(ml_dmt_interpolated(2, 4, 0.5) == 5.5);
  CHECK(ml_dmt_interpolated(2, 4, 2.5) == 0.0);
  CHECK_THROWS_AS(dmt_theoretical(3, 2, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ml_dmt_reference(2, 4, 3), std::invalid_argument);
}

TEST_CASE("tradeoff decomposition identity") {
  const auto d = dmt_decomposition_check(2, 4, 0.4, 0.3);
  CHECK(d.direct == doctest::Approx(1.5));
  CHECK(d.diversity_shift == doctest::Approx(1.5));
  CHECK(d.rate_shift == doctest::Approx(1.5));

  const auto z = dmt_decomposition_check(3, 5, 1.0, 0.0);
  CHECK(z.direct == dmt_p2p(3, 5, 1.0));
  CHECK(z.rate_shift == dmt_p2p(3, 5, 1.0));

  for (int i = 0; i < 10; ++i) {
    const double xi = 0.099 * i;
    for (int j = 0; j < 10; ++j) {
      const double r = 2.0 * (1.0 - xi) * j / 9.0;
      const auto e = dmt_decomposition_check(2, 4, r, xi);
      REQUIRE(std::abs(e.direct - e.diversity_shift) <= 1e-12);
      REQUIRE(std::abs(e.direct - e.rate_shift) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(dmt_decomposition_check(2, 4, 1.5, 0.5), std::invalid_argument);
}
