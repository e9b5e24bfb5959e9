#pragma once

#include <span>
#include <string>
#include <vector>

#include "islesim/common.hpp"

namespace islesim {

/// Per-unit normalization bases. v_base is line-to-line volts.
struct PerUnitBase {
  double s_base_va = 0.0;
  double v_base_v = 0.0;

  double z_base_ohm() const { return v_base_v * v_base_v / s_base_va; }
  double i_base_a() const;
};

/// One series line segment. Impedance is per length so length scaling
/// (the long-line case study) works by scaling length_km alone.
struct Branch {
  int from_bus = -1;
  int to_bus = -1;
  double r_per_km = 0.0;   // ohm/km
  double x_per_km = 0.0;   // ohm/km
  double length_km = 0.0;
};

struct LoadSpec {
  int bus = -1;
  double p_pu = 0.0;          // active power at nominal voltage
  double power_factor = 1.0;  // (0, 1], lagging

  double q_pu() const;
};

struct MeasurementBuses {
  int start = -1;   // first bus after the source
  int middle = -1;  // topologically middle bus on the source->PV path
  int end = -1;     // the PV bus
};

/// Validated radial feeder in per-unit. Bus 0 is always the source bus,
/// which sits behind source_impedance_pu relative to the source EMF.
struct FeederModel {
  PerUnitBase base;
  std::vector<std::string> bus_names;
  std::vector<Branch> branches;
  std::vector<LoadSpec> loads;
  int pv_bus = -1;
  Complex source_impedance_pu{0.0, 0.0};
  MeasurementBuses measurement;

  int bus_count() const { return static_cast<int>(bus_names.size()); }
  Complex branch_impedance_pu(const Branch& b) const {
    return Complex{b.r_per_km, b.x_per_km} * (b.length_km / base.z_base_ohm());
  }
};

/// Raw feeder description as found in a feeder file, before validation.
struct FeederSpec {
  double s_base_mva = 0.0;
  double v_base_kv = 0.0;
  std::vector<std::string> buses;
  struct RawBranch {
    std::string from, to;
    double r_per_km = 0.0, x_per_km = 0.0, length_km = 0.0;
  };
  std::vector<RawBranch> branches;
  struct RawLoad {
    std::string bus;
    double p_mw = 0.0;
    double pf = 1.0;
  };
  std::vector<RawLoad> loads;
  std::string pv_bus;
  Complex source_impedance_pu{0.0, 0.0};
};

/// Validates the raw spec and resolves measurement buses.
/// Throws ValidationError on non-tree topology, dangling references or
/// non-positive bases.
FeederModel build_feeder(const FeederSpec& raw);

/// The shipped synthetic 11 kV feeder (stand-in for the unpublished
/// utility data): 7 buses in a chain, 5 km total, PV park at the end.
FeederSpec default_feeder_spec();
FeederModel default_feeder();

/// Parse a feeder description file (JSON). Throws ValidationError.
FeederSpec load_feeder_spec(const std::string& path);

/// Returns a copy with every branch length multiplied by factor.
FeederModel scale_line_length(const FeederModel& model, double factor);

struct NetworkSolution {
  std::vector<Complex> bus_voltage;    // pu phasors
  std::vector<Complex> branch_current; // pu, oriented from->to
  std::vector<Complex> injection;      // net complex power entering the network at each bus, pu
};

struct PowerFlowInit {
  NetworkSolution solution;
  std::vector<Complex> load_admittance;  // constant-Z equivalent of each load at its solved voltage
  Complex pv_current{0.0, 0.0};          // PV injection current at the solved operating point
};

/// Backward/forward sweep with constant-power loads (scaled by load_scale)
/// and the PV plant as a constant-power injection at the PV bus.
/// Converged when the max bus-voltage change between sweeps < 1e-10 pu.
/// Throws ConvergenceError after 100 iterations.
PowerFlowInit init_power_flow(const FeederModel& model, Complex pv_power_pu,
                              double load_scale,
                              Complex source_emf = Complex{1.0, 0.0});

/// Exact solution of the linear network: constant-admittance loads plus a
/// single current injection at the PV bus. Throws ConvergenceError if the
/// admittance matrix is singular.
NetworkSolution solve_network(const FeederModel& model, Complex source_emf,
                              Complex pv_current,
                              std::span<const Complex> load_admittance);

/// Largest apparent-power mismatch across all buses for a solved network
/// with the given per-bus device injections (positive = into the network).
/// The source bus balances against the EMF branch flow.
double max_power_residual(const FeederModel& model, const NetworkSolution& sol,
                          std::span<const Complex> device_injection,
                          Complex source_emf = Complex{1.0, 0.0});

inline constexpr double kSweepTol = 1e-10;
inline constexpr int kSweepMaxIter = 100;
inline constexpr double kBalanceTol = 1e-8;

}  // namespace islesim
