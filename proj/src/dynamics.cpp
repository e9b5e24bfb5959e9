#include "islesim/dynamics.hpp"

#include <cmath>
#include <numbers>

namespace islesim {

void SwingParams::validate() const {
  if (!(h_s > 0.0)) throw ValidationError("inertia constant must be > 0");
  if (d_pu < 0.0) throw ValidationError("damping must be >= 0");
  if (f_n_hz != 50.0 && f_n_hz != 60.0)
    throw ValidationError("nominal frequency must be 50 or 60 Hz");
  if (!(s_sys_pu > 0.0)) throw ValidationError("machine rating must be > 0");
}

void EventSchedule::validate() const {
  if (dip_start_s < 0.0 || !(dip_start_s < dip_clear_s))
    throw ValidationError("event schedule requires 0 <= dip_start < dip_clear");
  if (!(dip_residual_pu > 0.0) || !(dip_residual_pu < 1.0))
    throw ValidationError("dip residual voltage must be in (0, 1)");
}

SwingState swing_step(SwingState state, const SwingParams& params,
                      double p_elec_pu, double dt_s) {
  if (!(dt_s > 0.0)) throw ValidationError("swing step dt must be > 0");
  if (!std::isfinite(p_elec_pu) || !std::isfinite(state.delta_f_hz) ||
      !std::isfinite(state.delta_rad))
    throw ValidationError("swing step rejects non-finite inputs");

  const double two_pi = 2.0 * std::numbers::pi;
  auto df_dot = [&](double delta_f) {
    return params.f_n_hz *
           (state.p_mech_pu - p_elec_pu - params.d_pu * delta_f / params.f_n_hz) /
           (2.0 * params.h_s * params.s_sys_pu);
  };

  const double k1_f = df_dot(state.delta_f_hz);
  const double k1_a = two_pi * state.delta_f_hz;
  const double f_pred = state.delta_f_hz + dt_s * k1_f;
  const double k2_f = df_dot(f_pred);
  const double k2_a = two_pi * f_pred;

  SwingState out = state;
  out.delta_f_hz += 0.5 * dt_s * (k1_f + k2_f);
  out.delta_rad += 0.5 * dt_s * (k1_a + k2_a);
  return out;
}

Complex apply_events(double t_s, const EventSchedule& schedule,
                     Complex nominal_emf) {
  if (t_s >= schedule.dip_start_s && t_s < schedule.dip_clear_s)
    return nominal_emf * schedule.dip_residual_pu;
  return nominal_emf;
}

BusFrequencyTracker::BusFrequencyTracker(double initial_angle_rad,
                                         double nominal_f_hz, double washout_s)
    : prev_angle_rad_(initial_angle_rad),
      f_local_hz_(nominal_f_hz),
      washout_s_(washout_s) {
  if (!(washout_s_ > 0.0))
    throw ValidationError("washout time constant must be > 0");
}

double BusFrequencyTracker::update(Complex bus_phasor, double system_f_hz,
                                   double dt_s) {
  if (!(std::abs(bus_phasor) > 0.0))
    throw ValidationError("bus voltage collapsed: zero-magnitude phasor");
  const double two_pi = 2.0 * std::numbers::pi;
  double angle = std::arg(bus_phasor);
  // Unwrapped step, mapped into (-pi, pi].
  double dtheta = std::remainder(angle - prev_angle_rad_, two_pi);
  prev_angle_rad_ = angle;
  double raw_rate = dtheta / dt_s;
  rate_state_rad_s_ += (dt_s / (washout_s_ + dt_s)) * (raw_rate - rate_state_rad_s_);
  f_local_hz_ = system_f_hz + rate_state_rad_s_ / two_pi;
  return f_local_hz_;
}

}  // namespace islesim
