#include "islesim/protocol.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace islesim {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  bool u64(std::uint64_t& out) {
    if (pos_ + 8 > data_.size()) return false;
    out = 0;
    for (int i = 0; i < 8; ++i)
      out |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return true;
  }

  bool f64(double& out) {
    std::uint64_t bits = 0;
    if (!u64(bits)) return false;
    out = std::bit_cast<double>(bits);
    return true;
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> frame(FrameType type,
                                const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> out;
  out.reserve(5 + payload.size());
  put_u32(out, static_cast<std::uint32_t>(1 + payload.size()));
  out.push_back(static_cast<std::uint8_t>(type));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

DecodeResult fail(const std::string& why) { return DecodeResult{std::nullopt, why}; }

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::vector<std::uint8_t> encode_frame(const Message& msg) {
  std::vector<std::uint8_t> p;
  return std::visit(
      [&](const auto& m) -> std::vector<std::uint8_t> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, HelloMsg>) {
          put_u64(p, m.version);
          put_f64(p, m.dt_s);
          put_u64(p, m.step_count);
          put_u64(p, m.scenario_digest);
          return frame(FrameType::Hello, p);
        } else if constexpr (std::is_same_v<T, HelloAckMsg>) {
          put_u64(p, m.version);
          put_f64(p, m.dt_s);
          put_u64(p, m.step_count);
          put_u64(p, m.scenario_digest);
          return frame(FrameType::HelloAck, p);
        } else if constexpr (std::is_same_v<T, MeasMsg>) {
          put_u64(p, m.seq);
          put_f64(p, m.t_s);
          put_f64(p, m.v_mag_pu);
          put_f64(p, m.v_ang_rad);
          put_f64(p, m.f_local_hz);
          put_f64(p, m.rocof_hz_per_s);
          return frame(FrameType::Meas, p);
        } else if constexpr (std::is_same_v<T, CmdMsg>) {
          put_u64(p, m.seq);
          put_f64(p, m.i_p_ref_pu);
          put_f64(p, m.i_q_ref_pu);
          put_f64(p, m.breaker_open ? 1.0 : 0.0);
          return frame(FrameType::Cmd, p);
        } else if constexpr (std::is_same_v<T, ByeMsg>) {
          return frame(FrameType::Bye, p);
        } else {
          put_u64(p, m.code);
          return frame(FrameType::Error, p);
        }
      },
      msg);
}

DecodeResult decode_frame(std::span<const std::uint8_t> buf) {
  if (buf.size() < 5) return fail("truncated frame: shorter than header");
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i)
    len |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  if (len == 0) return fail("frame length must be at least 1");
  if (len > kMaxFrameLen) return fail("frame length exceeds maximum");
  if (buf.size() != 4u + len) return fail("frame length field does not match buffer");

  const auto type = static_cast<FrameType>(buf[4]);
  Reader r(buf.subspan(5));
  switch (type) {
    case FrameType::Hello:
    case FrameType::HelloAck: {
      std::uint64_t version = 0, steps = 0, digest = 0;
      double dt = 0.0;
      if (!r.u64(version) || !r.f64(dt) || !r.u64(steps) || !r.u64(digest) ||
          !r.done())
        return fail("bad handshake payload size");
      if (!finite(dt)) return fail("non-finite dt in handshake");
      if (type == FrameType::Hello)
        return DecodeResult{HelloMsg{version, dt, steps, digest}, {}};
      return DecodeResult{HelloAckMsg{version, dt, steps, digest}, {}};
    }
    case FrameType::Meas: {
      MeasMsg m;
      if (!r.u64(m.seq) || !r.f64(m.t_s) || !r.f64(m.v_mag_pu) ||
          !r.f64(m.v_ang_rad) || !r.f64(m.f_local_hz) ||
          !r.f64(m.rocof_hz_per_s) || !r.done())
        return fail("bad MEAS payload size");
      if (!finite(m.t_s) || !finite(m.v_mag_pu) || !finite(m.v_ang_rad) ||
          !finite(m.f_local_hz) || !finite(m.rocof_hz_per_s))
        return fail("non-finite field in MEAS");
      return DecodeResult{m, {}};
    }
    case FrameType::Cmd: {
      CmdMsg m;
      double breaker = 0.0;
      if (!r.u64(m.seq) || !r.f64(m.i_p_ref_pu) || !r.f64(m.i_q_ref_pu) ||
          !r.f64(breaker) || !r.done())
        return fail("bad CMD payload size");
      if (!finite(m.i_p_ref_pu) || !finite(m.i_q_ref_pu))
        return fail("non-finite field in CMD");
      if (breaker != 0.0 && breaker != 1.0)
        return fail("breaker flag must encode as 0.0 or 1.0");
      m.breaker_open = breaker == 1.0;
      return DecodeResult{m, {}};
    }
    case FrameType::Bye:
      if (!r.done()) return fail("BYE carries no payload");
      return DecodeResult{ByeMsg{}, {}};
    case FrameType::Error: {
      ErrorMsg m;
      if (!r.u64(m.code) || !r.done()) return fail("bad ERROR payload size");
      return DecodeResult{m, {}};
    }
  }
  return fail("unknown frame type");
}

const char* frame_type_name(FrameType t) {
  switch (t) {
    case FrameType::Hello: return "HELLO";
    case FrameType::HelloAck: return "HELLO_ACK";
    case FrameType::Meas: return "MEAS";
    case FrameType::Cmd: return "CMD";
    case FrameType::Bye: return "BYE";
    case FrameType::Error: return "ERROR";
  }
  return "?";
}

}  // namespace islesim
