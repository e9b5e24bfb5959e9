#pragma once

#include "islesim/protocol.hpp"
#include "islesim/pvplant.hpp"

namespace islesim {

/// State of the reference PV plant controller. The same function drives the
/// in-process loop, the remote controller process and the plant-side shadow
/// used for recording, so all three evolve bit-identically from the same
/// measurement stream.
struct ControllerState {
  InverterState inv;
};

/// Initial controller state at the pre-disturbance operating point.
ControllerState make_controller_state(const InverterParams& params,
                                      double p_avail_pu);

/// One controller sample: LVRT mode machine, then the current reference for
/// the measured PCC voltage. Consumes only scalar fields of the measurement
/// so wire transport cannot change the result.
CmdMsg reference_controller_step(ControllerState& cs, const MeasMsg& m,
                                 const InverterParams& params,
                                 double p_avail_pu);

}  // namespace islesim
