#include "doctest.h"

#include <cmath>
#include <random>

#include "islesim/netmodel.hpp"

using namespace islesim;

namespace {

// Independent closed-form solution of the two-bus equation: EMF behind a
// single series impedance feeding one constant-power load. Solves the
// voltage-magnitude quadratic and reconstructs the phasor.
Complex two_bus_oracle(Complex emf, Complex z, Complex s_load) {
  const double r = z.real(), x = z.imag();
  const double p = s_load.real(), q = s_load.imag();
  const double e2 = std::norm(emf);
  const double b = e2 - 2.0 * (r * p + x * q);
  const double disc = b * b - 4.0 * std::norm(z) * std::norm(s_load);
  REQUIRE(disc >= 0.0);
  const double v2 = 0.5 * (b + std::sqrt(disc));
  // conj(V) * E = |V|^2 + z * conj(S)  =>  V = (|V|^2 + conj(z) S) / conj(E)
  return (v2 + std::conj(z) * s_load) / std::conj(emf);
}

FeederSpec two_bus_spec(Complex z_src, Complex z_branch, double p_mw = 0.0,
                        double pf = 1.0) {
  FeederSpec s;
  s.s_base_mva = 10.0;
  s.v_base_kv = 11.0;
  s.buses = {"src", "pv"};
  const double z_base = 11.0 * 11.0 / 10.0;  // 12.1 ohm
  s.branches.push_back({"src", "pv", z_branch.real() * z_base,
                        z_branch.imag() * z_base, 1.0});
  if (p_mw > 0.0) s.loads.push_back({"pv", p_mw, pf});
  s.pv_bus = "pv";
  s.source_impedance_pu = z_src;
  return s;
}

std::vector<Complex> device_injections(const FeederModel& m, Complex pv_power,
                                       double load_scale) {
  std::vector<Complex> s(m.bus_count(), Complex{0.0, 0.0});
  for (const LoadSpec& l : m.loads)
    s[l.bus] -= load_scale * Complex{l.p_pu, l.q_pu()};
  s[m.pv_bus] += pv_power;
  return s;
}

}  // namespace

TEST_CASE("build_feeder resolves the default chain") {
  FeederModel m = default_feeder();
  CHECK(m.bus_count() == 7);
  CHECK(m.branches.size() == 6);
  CHECK(m.pv_bus == 6);
  CHECK(m.measurement.start == 1);
  CHECK(m.measurement.middle == 3);
  CHECK(m.measurement.end == m.pv_bus);
  // End of the line is the PV bus by traversal.
  double total_km = 0.0;
  for (const auto& b : m.branches) total_km += b.length_km;
  CHECK(total_km == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("build_feeder degenerate two-bus feeder") {
  FeederModel m = build_feeder(two_bus_spec({0.004, 0.01}, {0.006, 0.02}));
  CHECK(m.bus_count() == 2);
  CHECK(m.branches.size() == 1);
  CHECK(m.measurement.start == 1);
  CHECK(m.measurement.middle == m.measurement.end);
  CHECK(m.measurement.end == m.pv_bus);
}

TEST_CASE("build_feeder rejects bad topologies") {
  FeederSpec s = default_feeder_spec();

  SUBCASE("cycle") {
    s.branches.push_back({"b5", "b2", 0.4, 0.35, 1.0});
    s.buses.push_back("extra");  // keep the branch-count rule satisfied
    CHECK_THROWS_AS(build_feeder(s), ValidationError);
  }
  SUBCASE("duplicate parallel branch forms a loop") {
    FeederSpec t = s;
    t.branches[5] = t.branches[4];  // b4-b5 twice, pv dangling
    CHECK_THROWS_AS(build_feeder(t), ValidationError);
  }
  SUBCASE("branch count off") {
    s.branches.pop_back();
    CHECK_THROWS_AS(build_feeder(s), ValidationError);
  }
  SUBCASE("dangling bus reference") {
    s.branches[0].to = "nowhere";
    CHECK_THROWS_AS(build_feeder(s), ValidationError);
  }
  SUBCASE("unknown load bus") {
    s.loads[0].bus = "nowhere";
    CHECK_THROWS_AS(build_feeder(s), ValidationError);
  }
  SUBCASE("non-positive base") {
    s.s_base_mva = 0.0;
    CHECK_THROWS_AS(build_feeder(s), ValidationError);
  }
  SUBCASE("source impedance must be fully positive") {
    s.source_impedance_pu = Complex{0.0, 0.08};
    CHECK_THROWS_AS(build_feeder(s), ValidationError);
  }
}

TEST_CASE("scale_line_length") {
  FeederModel m = default_feeder();

  SUBCASE("identity") {
    FeederModel a = scale_line_length(m, 1.0);
    for (size_t i = 0; i < m.branches.size(); ++i)
      CHECK(a.branches[i].length_km == m.branches[i].length_km);
  }
  SUBCASE("factor scales impedance") {
    for (double f : {10.0, 0.5}) {
      FeederModel a = scale_line_length(m, f);
      for (size_t i = 0; i < m.branches.size(); ++i) {
        CHECK(a.branch_impedance_pu(a.branches[i]).real() ==
              doctest::Approx(f * m.branch_impedance_pu(m.branches[i]).real())
                  .epsilon(1e-14));
        CHECK(a.branch_impedance_pu(a.branches[i]).imag() ==
              doctest::Approx(f * m.branch_impedance_pu(m.branches[i]).imag())
                  .epsilon(1e-14));
      }
    }
  }
  SUBCASE("composition is the product, field for field") {
    for (double a : {0.25, 0.5, 1.0, 2.0, 4.0, 5.0, 10.0}) {
      for (double b : {0.5, 2.0, 8.0, 10.0}) {
        FeederModel lhs = scale_line_length(scale_line_length(m, a), b);
        FeederModel rhs = scale_line_length(m, a * b);
        for (size_t i = 0; i < m.branches.size(); ++i)
          CHECK(lhs.branches[i].length_km ==
                doctest::Approx(rhs.branches[i].length_km).epsilon(1e-15));
        CHECK(lhs.pv_bus == rhs.pv_bus);
        CHECK(lhs.measurement.middle == rhs.measurement.middle);
      }
    }
  }
  SUBCASE("rejects non-positive factors") {
    CHECK_THROWS_AS(scale_line_length(m, 0.0), ValidationError);
    CHECK_THROWS_AS(scale_line_length(m, -2.0), ValidationError);
  }
}

TEST_CASE("init_power_flow zero load and zero PV gives a flat profile") {
  FeederModel m = default_feeder();
  PowerFlowInit init = init_power_flow(m, {0.0, 0.0}, 0.0);
  for (const Complex& v : init.solution.bus_voltage)
    CHECK(std::abs(v - Complex{1.0, 0.0}) < 1e-15);
}

TEST_CASE("init_power_flow matches the two-bus closed form") {
  // Total series impedance 0.01 + j0.03 split between source and branch.
  const Complex z_src{0.004, 0.01};
  const Complex z_branch{0.006, 0.02};
  const Complex s_load{0.5, 0.242};
  FeederSpec spec = two_bus_spec(z_src, z_branch, s_load.real() * 10.0,
                                 s_load.real() / std::abs(s_load));
  FeederModel m = build_feeder(spec);

  PowerFlowInit init = init_power_flow(m, {0.0, 0.0}, 1.0);
  Complex expected = two_bus_oracle({1.0, 0.0}, z_src + z_branch,
                                    {m.loads[0].p_pu, m.loads[0].q_pu()});
  CHECK(std::abs(init.solution.bus_voltage[1] - expected) < 1e-9);

  // Power balance at the load bus against the specified draw.
  auto dev = device_injections(m, {0.0, 0.0}, 1.0);
  CHECK(max_power_residual(m, init.solution, dev) <= 1e-8);
}

TEST_CASE("init_power_flow load scaling is monotone toward the feeder end") {
  FeederModel m = default_feeder();
  const double scales[] = {0.0, 0.10, 0.25, 0.50, 1.0};
  std::vector<PowerFlowInit> runs;
  for (double ls : scales) runs.push_back(init_power_flow(m, {0.0, 0.0}, ls));

  for (size_t i = 0; i + 1 < runs.size(); ++i) {
    bool distinct = false;
    for (int b = 0; b < m.bus_count(); ++b) {
      double hi = std::abs(runs[i].solution.bus_voltage[b]);
      double lo = std::abs(runs[i + 1].solution.bus_voltage[b]);
      CHECK(lo <= hi + 1e-12);
      if (std::abs(hi - lo) > 1e-9) distinct = true;
    }
    CHECK(distinct);
  }
  // Residual bound holds at every scale.
  for (size_t i = 0; i < runs.size(); ++i) {
    auto dev = device_injections(m, {0.0, 0.0}, scales[i]);
    CHECK(max_power_residual(m, runs[i].solution, dev) <= 1e-8);
  }
}

TEST_CASE("init_power_flow signals infeasible loading") {
  FeederModel m = default_feeder();
  CHECK_THROWS_AS(init_power_flow(m, {0.0, 0.0}, 400.0), ConvergenceError);
}

TEST_CASE("solve_network flat profile with no loads or injection") {
  FeederModel m = default_feeder();
  std::vector<Complex> y(m.bus_count(), Complex{0.0, 0.0});
  NetworkSolution sol = solve_network(m, {1.0, 0.0}, {0.0, 0.0}, y);
  for (const Complex& v : sol.bus_voltage)
    CHECK(std::abs(v - Complex{1.0, 0.0}) < 1e-12);
}

TEST_CASE("solve_network is linear: superposition to 1e-12") {
  FeederModel m = default_feeder();
  PowerFlowInit init = init_power_flow(m, {0.1, 0.0}, 1.0);
  const auto& y = init.load_admittance;

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Complex e1{1.0 + 0.1 * u(rng), 0.1 * u(rng)};
    Complex e2{0.5 * u(rng), 0.1 * u(rng)};
    Complex i1{0.2 * u(rng), 0.2 * u(rng)};
    Complex i2{0.2 * u(rng), 0.2 * u(rng)};
    NetworkSolution a = solve_network(m, e1, i1, y);
    NetworkSolution b = solve_network(m, e2, i2, y);
    NetworkSolution ab = solve_network(m, e1 + e2, i1 + i2, y);
    for (int bus = 0; bus < m.bus_count(); ++bus)
      CHECK(std::abs(a.bus_voltage[bus] + b.bus_voltage[bus] -
                     ab.bus_voltage[bus]) < 1e-12);
  }

  // A pure EMF dip scales the no-injection voltages exactly.
  NetworkSolution full = solve_network(m, {1.0, 0.0}, {0.0, 0.0}, y);
  NetworkSolution dipped = solve_network(m, {0.4, 0.0}, {0.0, 0.0}, y);
  for (int bus = 0; bus < m.bus_count(); ++bus)
    CHECK(std::abs(dipped.bus_voltage[bus] - 0.4 * full.bus_voltage[bus]) < 1e-12);
}

TEST_CASE("solve_network reproduces the initialization operating point") {
  FeederModel m = default_feeder();
  for (double pv : {0.0, 0.05, 0.15}) {
    PowerFlowInit init = init_power_flow(m, {pv, 0.0}, 1.0);
    NetworkSolution sol =
        solve_network(m, {1.0, 0.0}, init.pv_current, init.load_admittance);
    for (int bus = 0; bus < m.bus_count(); ++bus)
      CHECK(std::abs(sol.bus_voltage[bus] - init.solution.bus_voltage[bus]) < 1e-9);
  }
}

TEST_CASE("monotone voltage drop: longer branches never raise the end voltage") {
  FeederModel base = default_feeder();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> scale(0.2, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    double ls = scale(rng);
    PowerFlowInit init = init_power_flow(base, {0.0, 0.0}, ls);
    NetworkSolution ref =
        solve_network(base, {1.0, 0.0}, {0.0, 0.0}, init.load_admittance);
    double v_end_ref = std::abs(ref.bus_voltage[base.measurement.end]);
    for (size_t bi = 0; bi < base.branches.size(); ++bi) {
      FeederModel longer = base;
      longer.branches[bi].length_km *= 1.5;
      NetworkSolution sol =
          solve_network(longer, {1.0, 0.0}, {0.0, 0.0}, init.load_admittance);
      CHECK(std::abs(sol.bus_voltage[longer.measurement.end]) <=
            v_end_ref + 1e-12);
    }
  }
}

TEST_CASE("per-unit base invariants") {
  PerUnitBase b{10e6, 11e3};
  CHECK(b.z_base_ohm() == doctest::Approx(12.1).epsilon(1e-12));
  CHECK(b.i_base_a() == doctest::Approx(10e6 / (std::sqrt(3.0) * 11e3)).epsilon(1e-12));
}
