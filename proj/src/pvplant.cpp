#include "islesim/pvplant.hpp"

#include <algorithm>
#include <cmath>

namespace islesim {

namespace {
constexpr double kVoltageFloor = 0.1;  // guards current computation near collapse
constexpr double kPowerEps = 1e-12;
}  // namespace

double mpp_power(const ModuleParams& mp, const OperatingEnv& env) {
  if (env.irradiance_w_m2 < 0.0)
    throw ValidationError("irradiance must be >= 0");
  if (env.cell_temp_c < -40.0 || env.cell_temp_c > 90.0)
    throw ValidationError("cell temperature out of range [-40, 90] C");
  double p = mp.p_stc_pu * (env.irradiance_w_m2 / ModuleParams::kGStc) *
             (1.0 + mp.gamma_per_k * (env.cell_temp_c - ModuleParams::kTStc));
  return std::clamp(p, 0.0, mp.p_stc_pu * 1.05);
}

InverterState lvrt_transition(InverterState st, double v_pcc_pu, double t_s,
                              const InverterParams& params) {
  switch (st.mode) {
    case InverterMode::Isolated:
      break;
    case InverterMode::Normal:
      if (v_pcc_pu < params.v_enter_pu) {
        st.mode = InverterMode::Lvrt;
        st.p_prefault_pu = st.p_ref_pu;
        st.above_exit_since_s.reset();
      }
      break;
    case InverterMode::Lvrt:
      if (v_pcc_pu >= params.v_exit_pu) {
        if (!st.above_exit_since_s) st.above_exit_since_s = t_s;
        if (t_s - *st.above_exit_since_s >= params.exit_hold_s - kPowerEps) {
          st.mode = InverterMode::Recovery;
          st.recovery_started_s = t_s;
          st.above_exit_since_s.reset();
        }
      } else {
        st.above_exit_since_s.reset();
      }
      break;
    case InverterMode::Recovery: {
      double ramped =
          params.p_ramp_pu_per_s * (t_s - st.recovery_started_s.value_or(t_s));
      st.p_ref_pu = std::min(ramped, st.p_prefault_pu);
      if (st.p_ref_pu >= st.p_prefault_pu - kPowerEps) {
        st.mode = InverterMode::Normal;
        st.recovery_started_s.reset();
      }
      break;
    }
  }
  return st;
}

CurrentRef current_reference(const InverterState& st, double v_pcc_pu,
                             const InverterParams& params, double p_avail_pu) {
  if (v_pcc_pu < 0.0) throw ValidationError("PCC voltage magnitude must be >= 0");
  const double i_rated = params.i_rated_pu();
  const double i_cap = params.i_max * i_rated;
  const double v = std::max(v_pcc_pu, kVoltageFloor);

  CurrentRef ref;
  switch (st.mode) {
    case InverterMode::Isolated:
      break;
    case InverterMode::Normal:
      ref.i_p_pu = std::min(std::min(p_avail_pu, params.s_rated_pu) / v, i_cap);
      break;
    case InverterMode::Lvrt: {
      double iq_n = std::clamp(params.k_q * (params.v_enter_pu - v_pcc_pu), 0.0,
                               params.i_max);
      double headroom_n = std::sqrt(std::max(
          params.i_max * params.i_max - iq_n * iq_n, 0.0));
      double ip_n = std::min(headroom_n, p_avail_pu / (v * i_rated));
      ref.i_q_pu = iq_n * i_rated;
      ref.i_p_pu = ip_n * i_rated;
      break;
    }
    case InverterMode::Recovery:
      ref.i_p_pu = std::min(st.p_ref_pu / v, i_cap);
      break;
  }
  return ref;
}

InverterState apply_trip(InverterState st) {
  st.mode = InverterMode::Isolated;
  st.p_ref_pu = 0.0;
  st.q_ref_pu = 0.0;
  st.recovery_started_s.reset();
  st.above_exit_since_s.reset();
  return st;
}

Complex aligned_current(const CurrentRef& ref, Complex v_pcc) {
  double mag = std::abs(v_pcc);
  Complex unit = mag > 0.0 ? v_pcc / mag : Complex{1.0, 0.0};
  return Complex{ref.i_p_pu, -ref.i_q_pu} * unit;
}

}  // namespace islesim
