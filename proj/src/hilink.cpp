#include "islesim/hilink.hpp"

namespace islesim {

namespace {

void send_error(Stream& s, ProtoError code) {
  try {
    write_frame(s, ErrorMsg{static_cast<std::uint64_t>(code)});
  } catch (const TransportError&) {
    // Peer already gone; the local error is reported either way.
  }
}

[[noreturn]] void reject(Stream& s, ProtoError code, const std::string& why) {
  send_error(s, code);
  throw ProtocolError(why);
}

}  // namespace

RunResult plant_serve(World& world, Stream& stream, const LinkConfig& link) {
  world.result().valid = false;

  auto first = read_frame(stream, link.step_timeout_s);
  if (!first) throw ProtocolError("controller closed before HELLO");
  const auto* hello = std::get_if<HelloMsg>(&*first);
  if (!hello)
    reject(stream, ProtoError::MalformedFrame, "expected HELLO to open session");
  if (hello->version != link.protocol_version)
    reject(stream, ProtoError::VersionMismatch,
           "protocol version mismatch in HELLO");
  if (hello->dt_s != link.dt_s || hello->step_count != link.step_count)
    reject(stream, ProtoError::ConfigMismatch,
           "dt/step_count mismatch in HELLO");
  if (hello->scenario_digest != link.scenario_digest)
    reject(stream, ProtoError::DigestMismatch,
           "scenario digest mismatch in HELLO");
  write_frame(stream, HelloAckMsg{link.protocol_version, link.dt_s,
                                  link.step_count, link.scenario_digest});

  for (std::uint64_t k = 0; k < link.step_count; ++k) {
    write_frame(stream, world.measurement(k));
    std::optional<Message> reply;
    try {
      reply = read_frame(stream, link.step_timeout_s);
    } catch (const TransportError&) {
      send_error(stream, ProtoError::Timeout);
      throw;
    }
    if (!reply) throw TransportError("controller closed mid-session");
    const auto* cmd = std::get_if<CmdMsg>(&*reply);
    if (!cmd)
      reject(stream, ProtoError::MalformedFrame, "expected CMD frame");
    if (cmd->seq != k)
      reject(stream, ProtoError::SeqMismatch,
             "CMD sequence does not match pending MEAS");
    world.advance(*cmd);
  }
  write_frame(stream, ByeMsg{});
  world.result().valid = true;
  return world.result();
}

int controller_run(const InverterParams& params, double p_avail_pu,
                   Stream& stream, const LinkConfig& link) {
  write_frame(stream, HelloMsg{link.protocol_version, link.dt_s,
                               link.step_count, link.scenario_digest});
  std::optional<Message> ack;
  try {
    ack = read_frame(stream, link.step_timeout_s);
  } catch (const std::exception&) {
    return 2;
  }
  if (!ack || !std::holds_alternative<HelloAckMsg>(*ack)) return 2;
  const auto& a = std::get<HelloAckMsg>(*ack);
  if (a.version != link.protocol_version || a.dt_s != link.dt_s ||
      a.step_count != link.step_count ||
      a.scenario_digest != link.scenario_digest) {
    send_error(stream, ProtoError::ConfigMismatch);
    return 2;
  }

  ControllerState cs = make_controller_state(params, p_avail_pu);
  for (;;) {
    std::optional<Message> msg;
    try {
      msg = read_frame(stream, link.step_timeout_s);
    } catch (const ProtocolError&) {
      send_error(stream, ProtoError::MalformedFrame);
      return 2;
    } catch (const TransportError&) {
      return 2;
    }
    if (!msg) return 2;  // dropped without BYE
    if (std::holds_alternative<ByeMsg>(*msg)) return 0;
    if (std::holds_alternative<ErrorMsg>(*msg)) return 2;
    const auto* meas = std::get_if<MeasMsg>(&*msg);
    if (!meas) {
      send_error(stream, ProtoError::MalformedFrame);
      return 2;
    }
    CmdMsg cmd = reference_controller_step(cs, *meas, params, p_avail_pu);
    try {
      write_frame(stream, cmd);
    } catch (const TransportError&) {
      return 2;
    }
  }
}

}  // namespace islesim
