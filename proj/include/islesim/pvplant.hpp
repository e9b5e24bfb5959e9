#pragma once

#include <optional>

#include "islesim/common.hpp"

namespace islesim {

/// Aggregate PV array characteristics from module datasheet values.
struct ModuleParams {
  double p_stc_pu = 0.15;       // array rating at standard test conditions
  double gamma_per_k = -0.004;  // power temperature coefficient, negative

  static constexpr double kGStc = 1000.0;  // W/m^2
  static constexpr double kTStc = 25.0;    // deg C
};

struct OperatingEnv {
  double irradiance_w_m2 = 1000.0;
  double cell_temp_c = 25.0;
};

/// Available DC-side power at the given irradiance and cell temperature,
/// clamped to [0, 1.05 * p_stc].
double mpp_power(const ModuleParams& mp, const OperatingEnv& env);

enum class InverterMode { Normal = 0, Lvrt = 1, Recovery = 2, Isolated = 3 };

struct InverterParams {
  double s_rated_pu = 0.15;      // inverter rating on the system base
  double i_max = 1.1;            // current limit, per-unit of rated current
  double v_enter_pu = 0.9;       // LVRT entry threshold
  double v_exit_pu = 0.9;        // LVRT exit threshold
  double exit_hold_s = 0.02;     // voltage must hold above exit this long
  double k_q = 2.0;              // reactive current gain, pu current per pu voltage dip
  double p_ramp_pu_per_s = 0.15 / 0.28;  // active power recovery rate

  // Rated current in system per-unit (current at rated power, 1.0 pu voltage).
  double i_rated_pu() const { return s_rated_pu; }
};

struct InverterState {
  InverterMode mode = InverterMode::Normal;
  double p_ref_pu = 0.0;
  double q_ref_pu = 0.0;
  double p_prefault_pu = 0.0;
  std::optional<double> recovery_started_s;
  std::optional<double> above_exit_since_s;
};

/// Advances the LVRT mode machine one controller sample.
/// Normal -> Lvrt on undervoltage (records the pre-fault power);
/// Lvrt -> Recovery once voltage holds above exit for exit_hold;
/// Recovery -> Normal when the ramped power reference reaches the
/// pre-fault value. Isolated absorbs everything.
InverterState lvrt_transition(InverterState st, double v_pcc_pu, double t_s,
                              const InverterParams& params);

struct CurrentRef {
  double i_p_pu = 0.0;  // active, in phase with the PCC voltage
  double i_q_pu = 0.0;  // reactive, injected (voltage supporting)
};

/// Current reference for the present mode. Reactive current has priority in
/// Lvrt; active current takes the remaining headroom and is capped by the
/// available PV power. Magnitude never exceeds i_max * i_rated.
CurrentRef current_reference(const InverterState& st, double v_pcc_pu,
                             const InverterParams& params, double p_avail_pu);

/// Terminal isolation after a protection trip. Idempotent.
InverterState apply_trip(InverterState st);

/// Expresses a current reference as a phasor aligned with the PCC voltage.
Complex aligned_current(const CurrentRef& ref, Complex v_pcc);

}  // namespace islesim
