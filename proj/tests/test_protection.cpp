#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "islesim/protection.hpp"

using namespace islesim;

namespace {

RelayState run_relay(const std::vector<double>& rocof, double dt,
                     const RelaySettings& s) {
  RelayState rs;
  for (double r : rocof) rs = relay_step(rs, r, dt, s);
  return rs;
}

std::vector<double> times(std::size_t n, double dt) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) * dt;
  return t;
}

}  // namespace

TEST_CASE("rocof estimator: constant frequency gives zero slope") {
  RocofEstimator est({0.1, 1e-3});
  for (int k = 0; k < 300; ++k)
    CHECK(std::abs(est.update(k * 1e-3, 50.0)) <= 1e-12);
}

TEST_CASE("rocof estimator: exact on an affine ramp") {
  RocofEstimator est({0.1, 1e-3});
  double r = 0.0;
  for (int k = 0; k < 300; ++k) r = est.update(k * 1e-3, 50.0 + 0.625 * k * 1e-3);
  CHECK(std::abs(r - 0.625) < 1e-9);
}

TEST_CASE("rocof estimator: noise robustness via repeated trials") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> noise(-1e-3, 1e-3);
  for (int trial = 0; trial < 200; ++trial) {
    RocofEstimator est({0.1, 1e-3});
    double r = 0.0;
    for (int k = 0; k < 150; ++k)
      r = est.update(k * 1e-3, 50.0 + 0.625 * k * 1e-3 + noise(rng));
    CHECK(std::abs(r - 0.625) < 0.05);
  }
}

TEST_CASE("rocof estimator: shift invariance and sign symmetry") {
  RocofEstimator a({0.1, 1e-3}), b({0.1, 1e-3}), c({0.1, 1e-3});
  double ra = 0.0, rb = 0.0, rc = 0.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  for (int k = 0; k < 250; ++k) {
    double f = 0.3 * k * 1e-3 + jitter(rng);
    ra = a.update(k * 1e-3, 50.0 + f);
    rb = b.update(k * 1e-3, 173.456 + f);  // constant offset
    rc = c.update(k * 1e-3, 50.0 - f);     // negated motion
  }
  CHECK(std::abs(ra - rb) < 1e-12);
  CHECK(rc == -ra);
}

TEST_CASE("rocof estimator rejects non-monotonic timestamps") {
  RocofEstimator est({0.1, 1e-3});
  est.update(0.0, 50.0);
  est.update(1e-3, 50.0);
  CHECK_THROWS_AS(est.update(1e-3, 50.0), ValidationError);
  CHECK_THROWS_AS(est.update(0.5e-3, 50.0), ValidationError);
}

TEST_CASE("rocof estimator config validation") {
  CHECK_THROWS_AS(RocofEstimator({0.001, 1e-3}), ValidationError);
  CHECK_THROWS_AS(RocofEstimator({0.1, 0.0}), ValidationError);
}

TEST_CASE("relay trips per the grid-code rule: 1.7 Hz/s for 600 ms") {
  RelaySettings s;  // 1.7 Hz/s, 0.6 s
  const double dt = 1e-3;

  SUBCASE("1.8 Hz/s held 650 ms trips near 0.6 s") {
    RelayState rs = run_relay(std::vector<double>(650, 1.8), dt, s);
    CHECK(rs.tripped);
    REQUIRE(rs.trip_time_s.has_value());
    CHECK(*rs.trip_time_s == doctest::Approx(0.6).epsilon(0.01));
  }
  SUBCASE("1.8 Hz/s held 500 ms does not trip") {
    RelayState rs = run_relay(std::vector<double>(500, 1.8), dt, s);
    CHECK(!rs.tripped);
  }
  SUBCASE("1.6 Hz/s never trips") {
    RelayState rs = run_relay(std::vector<double>(5000, 1.6), dt, s);
    CHECK(!rs.tripped);
    CHECK(rs.above_timer_s == 0.0);
  }
  SUBCASE("negative rocof counts through the absolute value") {
    RelayState rs = run_relay(std::vector<double>(650, -1.8), dt, s);
    CHECK(rs.tripped);
  }
}

TEST_CASE("relay timer resets instantly on a sub-threshold sample") {
  RelaySettings s;
  const double dt = 1e-3;
  std::vector<double> trace(500, 1.8);
  trace.push_back(0.0);
  trace.insert(trace.end(), 500, 1.8);
  RelayState rs = run_relay(trace, dt, s);
  CHECK(!rs.tripped);
}

TEST_CASE("relay trip is latched forever") {
  RelaySettings s;
  RelayState rs = run_relay(std::vector<double>(700, 2.0), 1e-3, s);
  REQUIRE(rs.tripped);
  double t0 = *rs.trip_time_s;
  for (int k = 0; k < 2000; ++k) rs = relay_step(rs, 0.0, 1e-3, s);
  CHECK(rs.tripped);
  CHECK(*rs.trip_time_s == t0);
}

TEST_CASE("online relay agrees with the brute-force window scan") {
  RelaySettings s;
  const double dt = 1e-3;
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> seg_len(1, 900);
  std::uniform_int_distribution<int> level(0, 3);
  const double levels[4] = {0.0, 1.65, 1.75, 2.4};

  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> trace;
    while (trace.size() < 3000) {
      double v = levels[level(rng)];
      int n = seg_len(rng);
      for (int i = 0; i < n; ++i) trace.push_back(v);
    }
    trace.resize(3000);
    auto t = times(trace.size(), dt);

    RelayState rs;
    std::optional<double> online_time;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      rs = relay_step(rs, trace[i], dt, s);
      if (rs.tripped && !online_time) online_time = rs.trip_time_s;
    }
    auto scan = scan_for_trip(trace, t, s);
    REQUIRE(rs.tripped == scan.has_value());
    if (scan) CHECK(std::abs(*online_time - *scan) < 0.5 * dt);
  }
}

TEST_CASE("scan_for_trip input validation") {
  RelaySettings s;
  std::vector<double> r(10, 0.0);
  std::vector<double> t(9, 0.0);
  CHECK_THROWS_AS(scan_for_trip(r, t, s), ValidationError);
}
