#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace islesim {

/// Time series recorded at one measurement bus.
struct BusTrace {
  std::vector<double> v_pu;
  std::vector<double> f_hz;
  std::vector<double> rocof_hz_per_s;
};

/// Full record of one simulation run on a uniform time grid. Bus traces are
/// ordered start, middle, end of the line (end = PV bus / PCC).
struct RunResult {
  std::vector<double> t_s;
  std::array<BusTrace, 3> bus;
  std::vector<double> pv_p_pu;
  std::vector<double> pv_q_pu;
  std::vector<int> pv_mode;               // InverterMode as integer
  std::vector<std::uint8_t> relay_tripped;
  std::optional<double> relay_trip_time_s;
  std::uint64_t scenario_digest = 0;
  bool valid = true;  // false when a split-mode session aborted mid-run

  std::size_t step_count() const { return t_s.size(); }
};

struct MetricsSummary {
  std::array<double, 3> max_abs_rocof_hz_per_s{};  // start, middle, end
  bool relay_tripped = false;
  std::optional<double> trip_time_s;
  double voltage_nadir_pu = 0.0;            // minimum PCC voltage over the run
  std::optional<double> recovery_time_s;    // first return to Normal mode
};

}  // namespace islesim
