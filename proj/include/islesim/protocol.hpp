#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "islesim/common.hpp"

namespace islesim {

// Lockstep co-simulation wire protocol. Every frame is
//   [u32 LE length][u8 type][payload]
// where length counts the type byte plus the payload. Payload fields are
// little-endian 64-bit values in declaration order: sequence numbers and
// counters as unsigned integers, everything else IEEE-754 doubles.

inline constexpr std::uint64_t kProtocolVersion = 1;
inline constexpr std::uint32_t kMaxFrameLen = 64;

enum class FrameType : std::uint8_t {
  Hello = 0x01,
  HelloAck = 0x02,
  Meas = 0x03,
  Cmd = 0x04,
  Bye = 0x05,
  Error = 0x06,
};

struct HelloMsg {
  std::uint64_t version = kProtocolVersion;
  double dt_s = 0.0;
  std::uint64_t step_count = 0;
  std::uint64_t scenario_digest = 0;
  bool operator==(const HelloMsg&) const = default;
};

struct HelloAckMsg {
  std::uint64_t version = kProtocolVersion;
  double dt_s = 0.0;
  std::uint64_t step_count = 0;
  std::uint64_t scenario_digest = 0;
  bool operator==(const HelloAckMsg&) const = default;
};

/// Plant -> controller: PCC measurements from the state after step seq-1.
struct MeasMsg {
  std::uint64_t seq = 0;
  double t_s = 0.0;
  double v_mag_pu = 0.0;
  double v_ang_rad = 0.0;
  double f_local_hz = 0.0;
  double rocof_hz_per_s = 0.0;
  bool operator==(const MeasMsg&) const = default;
};

/// Controller -> plant: references applied by the plant at step seq.
struct CmdMsg {
  std::uint64_t seq = 0;
  double i_p_ref_pu = 0.0;
  double i_q_ref_pu = 0.0;
  bool breaker_open = false;
  bool operator==(const CmdMsg&) const = default;
};

struct ByeMsg {
  bool operator==(const ByeMsg&) const = default;
};

enum class ProtoError : std::uint64_t {
  VersionMismatch = 1,
  ConfigMismatch = 2,
  DigestMismatch = 3,
  SeqMismatch = 4,
  MalformedFrame = 5,
  Timeout = 6,
  Internal = 7,
};

struct ErrorMsg {
  std::uint64_t code = 0;
  bool operator==(const ErrorMsg&) const = default;
};

using Message =
    std::variant<HelloMsg, HelloAckMsg, MeasMsg, CmdMsg, ByeMsg, ErrorMsg>;

/// Serializes a message into a complete frame (length prefix included).
std::vector<std::uint8_t> encode_frame(const Message& msg);

struct DecodeResult {
  std::optional<Message> msg;
  std::string error;  // set when msg is empty
  bool ok() const { return msg.has_value(); }
};

/// Exact inverse of encode_frame over a complete frame buffer. Never
/// throws: malformed input yields a structured error.
DecodeResult decode_frame(std::span<const std::uint8_t> frame);

const char* frame_type_name(FrameType t);

}  // namespace islesim
