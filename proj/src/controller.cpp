#include "islesim/controller.hpp"

#include <algorithm>

namespace islesim {

ControllerState make_controller_state(const InverterParams& params,
                                      double p_avail_pu) {
  ControllerState cs;
  cs.inv.p_ref_pu = std::min(p_avail_pu, params.s_rated_pu);
  return cs;
}

CmdMsg reference_controller_step(ControllerState& cs, const MeasMsg& m,
                                 const InverterParams& params,
                                 double p_avail_pu) {
  cs.inv = lvrt_transition(cs.inv, m.v_mag_pu, m.t_s, params);
  CurrentRef ref = current_reference(cs.inv, m.v_mag_pu, params, p_avail_pu);
  cs.inv.p_ref_pu = m.v_mag_pu * ref.i_p_pu;
  cs.inv.q_ref_pu = m.v_mag_pu * ref.i_q_pu;

  CmdMsg cmd;
  cmd.seq = m.seq;
  cmd.i_p_ref_pu = ref.i_p_pu;
  cmd.i_q_ref_pu = ref.i_q_pu;
  cmd.breaker_open = false;
  return cmd;
}

}  // namespace islesim
