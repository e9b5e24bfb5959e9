#pragma once

#include <deque>
#include <optional>
#include <span>

#include "islesim/common.hpp"

namespace islesim {

struct RocofEstimatorCfg {
  double window_s = 0.1;
  double sample_dt_s = 1e-3;
};

/// Sliding-window least-squares slope of the frequency signal. This is the
/// RoCoF measurement a relay would form from its frequency samples.
class RocofEstimator {
 public:
  explicit RocofEstimator(RocofEstimatorCfg cfg);

  /// Push one (t, f) sample and return the current slope estimate in Hz/s.
  /// Returns 0 until at least two samples are in the window.
  /// Throws ValidationError on non-monotonic timestamps.
  double update(double t_s, double f_hz);

  double estimate() const { return estimate_; }
  std::size_t sample_count() const { return samples_.size(); }

 private:
  RocofEstimatorCfg cfg_;
  std::deque<std::pair<double, double>> samples_;
  double estimate_ = 0.0;
};

struct RelaySettings {
  double threshold_hz_per_s = 1.7;  // grid-code RoCoF threshold
  double duration_s = 0.6;          // must prevail this long to trip
};

struct RelayState {
  double above_timer_s = 0.0;
  bool tripped = false;
  std::optional<double> trip_time_s;
  double elapsed_s = 0.0;  // relay-local clock, advanced by dt per sample
};

/// Definite-time RoCoF relay step. |rocof| above threshold accumulates the
/// timer; any sub-threshold sample resets it instantly. The trip latches.
RelayState relay_step(RelayState rs, double rocof_hz_per_s, double dt_s,
                      const RelaySettings& settings);

/// Independent trip decision: scans the full recorded RoCoF trace for a
/// contiguous run of samples above threshold spanning at least duration.
/// Samples are assumed uniformly spaced by dt. Returns the time of the
/// sample at which the relay would latch, or nullopt.
std::optional<double> scan_for_trip(std::span<const double> rocof,
                                    std::span<const double> t,
                                    const RelaySettings& settings);

/// Tolerance applied when comparing accumulated time against the relay
/// duration, so N exact samples of dt sum up to a trip despite rounding.
inline constexpr double kRelayTimeEps = 1e-9;

}  // namespace islesim
