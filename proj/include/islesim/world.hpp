#pragma once

#include <cstdint>
#include <vector>

#include "islesim/controller.hpp"
#include "islesim/dynamics.hpp"
#include "islesim/netmodel.hpp"
#include "islesim/protection.hpp"
#include "islesim/protocol.hpp"
#include "islesim/pvplant.hpp"
#include "islesim/results.hpp"

namespace islesim {

struct WorldConfig {
  FeederModel feeder;
  SwingParams swing;
  EventSchedule events;
  InverterParams inverter;
  double p_avail_pu = 0.0;  // available PV power at the scenario's irradiance
  RelaySettings relay;
  RocofEstimatorCfg rocof;
  double dt_s = 1e-3;
  std::uint64_t step_count = 2000;
  std::uint64_t scenario_digest = 0;
};

/// The plant side of the co-simulation: network, swing dynamics,
/// measurements and protection. One step consumes the controller command
/// computed from the previous step's PCC measurements (one-step delay),
/// which makes the in-process loop and the split-process lockstep protocol
/// semantically identical.
class World {
 public:
  explicit World(WorldConfig cfg);

  /// PCC measurement frame for step `seq`, taken from the state after
  /// step seq-1 (the initial power flow for seq 0).
  MeasMsg measurement(std::uint64_t seq) const;

  /// Advances one step: events -> network solve with the commanded PV
  /// current -> machine power -> swing -> per-bus frequency/RoCoF ->
  /// relay -> record.
  void advance(const CmdMsg& cmd);

  bool relay_tripped() const { return relay_state_.tripped; }
  std::uint64_t steps_done() const { return step_index_; }
  double dt() const { return cfg_.dt_s; }
  std::uint64_t step_count() const { return cfg_.step_count; }
  const WorldConfig& config() const { return cfg_; }
  const SwingState& swing_state() const { return swing_; }
  const InverterState& inverter_state() const { return shadow_.inv; }

  /// Recorded traces; one row per completed step.
  RunResult& result() { return result_; }
  const RunResult& result() const { return result_; }

 private:
  WorldConfig cfg_;
  SwingState swing_;
  std::vector<Complex> load_admittance_;
  NetworkSolution last_solution_;
  double nominal_emf_mag_ = 1.0;
  std::uint64_t step_index_ = 0;

  // Shadow of the controller, stepped with the same measurements the real
  // controller sees; provides the recorded mode trace on the plant side.
  ControllerState shadow_;

  std::vector<BusFrequencyTracker> trackers_;  // start, middle, end
  std::vector<RocofEstimator> rocof_;
  RelayState relay_state_;
  bool force_zero_current_ = false;

  RunResult result_;
};

}  // namespace islesim
