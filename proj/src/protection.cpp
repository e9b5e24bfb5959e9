#include "islesim/protection.hpp"

#include <cmath>

namespace islesim {

RocofEstimator::RocofEstimator(RocofEstimatorCfg cfg) : cfg_(cfg) {
  if (!(cfg_.sample_dt_s > 0.0))
    throw ValidationError("rocof estimator sample_dt must be > 0");
  if (cfg_.window_s < 2.0 * cfg_.sample_dt_s)
    throw ValidationError("rocof window must cover at least two samples");
}

double RocofEstimator::update(double t_s, double f_hz) {
  if (!samples_.empty() && !(t_s > samples_.back().first))
    throw ValidationError("rocof samples must have strictly increasing timestamps");
  samples_.emplace_back(t_s, f_hz);
  // Half-sample slack so grid-time rounding cannot evict a sample that
  // belongs to the window.
  const double cutoff = t_s - cfg_.window_s - 0.5 * cfg_.sample_dt_s;
  while (samples_.front().first < cutoff) samples_.pop_front();

  // Hold at zero until the measuring window is established; a slope over a
  // handful of samples is not a relay-grade quantity.
  const std::size_t n = samples_.size();
  const double span = samples_.back().first - samples_.front().first;
  if (n < 2 || span < cfg_.window_s - 0.5 * cfg_.sample_dt_s) {
    estimate_ = 0.0;
    return estimate_;
  }
  double mean_t = 0.0, mean_f = 0.0;
  for (const auto& [t, f] : samples_) {
    mean_t += t;
    mean_f += f;
  }
  mean_t /= static_cast<double>(n);
  mean_f /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (const auto& [t, f] : samples_) {
    num += (t - mean_t) * (f - mean_f);
    den += (t - mean_t) * (t - mean_t);
  }
  estimate_ = den > 0.0 ? num / den : 0.0;
  return estimate_;
}

RelayState relay_step(RelayState rs, double rocof_hz_per_s, double dt_s,
                      const RelaySettings& settings) {
  if (!(dt_s > 0.0)) throw ValidationError("relay dt must be > 0");
  const double t_sample = rs.elapsed_s;
  rs.elapsed_s += dt_s;
  if (rs.tripped) return rs;
  if (std::abs(rocof_hz_per_s) > settings.threshold_hz_per_s) {
    rs.above_timer_s += dt_s;
    if (rs.above_timer_s >= settings.duration_s - kRelayTimeEps) {
      rs.tripped = true;
      rs.trip_time_s = t_sample;
    }
  } else {
    rs.above_timer_s = 0.0;
  }
  return rs;
}

std::optional<double> scan_for_trip(std::span<const double> rocof,
                                    std::span<const double> t,
                                    const RelaySettings& settings) {
  if (rocof.size() != t.size())
    throw ValidationError("rocof/time traces differ in length");
  if (rocof.size() < 2) return std::nullopt;
  const double dt = t[1] - t[0];
  std::size_t run = 0;
  for (std::size_t i = 0; i < rocof.size(); ++i) {
    if (std::abs(rocof[i]) > settings.threshold_hz_per_s) {
      ++run;
      if (static_cast<double>(run) * dt >= settings.duration_s - kRelayTimeEps)
        return t[i];
    } else {
      run = 0;
    }
  }
  return std::nullopt;
}

}  // namespace islesim
