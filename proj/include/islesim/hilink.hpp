#pragma once

#include <cstdint>
#include <string>

#include "islesim/controller.hpp"
#include "islesim/results.hpp"
#include "islesim/transport.hpp"
#include "islesim/world.hpp"

namespace islesim {

enum class LinkRole { Plant, Controller };

/// Session parameters both sides must agree on during the handshake.
struct LinkConfig {
  std::string address;  // host:port
  LinkRole role = LinkRole::Plant;
  std::uint64_t protocol_version = kProtocolVersion;
  double dt_s = 1e-3;
  std::uint64_t step_count = 0;
  std::uint64_t scenario_digest = 0;
  double step_timeout_s = 10.0;
};

/// Runs the plant side of the lockstep session over an established stream:
/// HELLO/HELLO_ACK handshake, then per step k send MEAS(k), block for
/// CMD(k), apply it and advance; BYE after the last step.
///
/// The one-message-per-step exchange realizes the same one-step controller
/// delay as the in-process loop, so a controller implementing the reference
/// law reproduces the in-process trajectory bit for bit.
///
/// Throws ProtocolError / TransportError on violations; world.result() is
/// marked invalid first so partial traces are never mistaken for results.
RunResult plant_serve(World& world, Stream& stream, const LinkConfig& link);

/// Runs the controller side: handshake, then reply to every MEAS with the
/// reference control law until BYE. Returns the process exit status
/// (0 clean, 2 transport/protocol failure).
int controller_run(const InverterParams& params, double p_avail_pu,
                   Stream& stream, const LinkConfig& link);

}  // namespace islesim
