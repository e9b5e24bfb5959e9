#pragma once

#include "islesim/common.hpp"

namespace islesim {

/// Aggregate-machine swing parameters for the islanded system.
struct SwingParams {
  double h_s = 4.0;       // inertia constant
  double d_pu = 20.0;     // damping, pu power per pu frequency deviation
  double f_n_hz = 50.0;   // nominal frequency
  double s_sys_pu = 1.0;  // machine rating on the system base

  void validate() const;
};

struct SwingState {
  double delta_f_hz = 0.0;  // frequency deviation from nominal
  double delta_rad = 0.0;   // rotor angle
  double p_mech_pu = 0.0;   // mechanical power, fixed after initialization
};

/// One Heun (explicit trapezoidal) step of the swing equation
///   d(delta_f)/dt = f_n (p_mech - p_elec - d delta_f / f_n) / (2 h s_sys)
///   d(delta)/dt   = 2 pi delta_f
/// with p_elec held constant over the step.
SwingState swing_step(SwingState state, const SwingParams& params,
                      double p_elec_pu, double dt_s);

struct EventSchedule {
  double dip_start_s = 0.0;
  double dip_clear_s = 0.3;
  double dip_residual_pu = 0.4;  // EMF magnitude factor during the dip

  void validate() const;
};

/// Source EMF at time t: magnitude scaled by dip_residual inside the
/// half-open dip interval [dip_start, dip_clear), phase untouched.
Complex apply_events(double t_s, const EventSchedule& schedule,
                     Complex nominal_emf);

/// Default washout time constant for the angle-rate extraction.
inline constexpr double kWashoutSeconds = 0.1;

/// Local frequency at one bus, extracted from the motion of its voltage
/// phasor: a washout on the unwrapped angle gives the angle rate, which
/// rides on top of the system frequency.
class BusFrequencyTracker {
 public:
  BusFrequencyTracker(double initial_angle_rad, double nominal_f_hz,
                      double washout_s = kWashoutSeconds);

  /// Push the bus phasor for this step; returns the filtered local
  /// frequency in Hz. Throws ValidationError on a zero-magnitude phasor.
  double update(Complex bus_phasor, double system_f_hz, double dt_s);

  double frequency_hz() const { return f_local_hz_; }

 private:
  double prev_angle_rad_;
  double rate_state_rad_s_ = 0.0;
  double f_local_hz_;
  double washout_s_;
};

}  // namespace islesim
