#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace islesim {

using Complex = std::complex<double>;

/// Input or configuration rejected before any computation ran.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iterative solver failed to reach its tolerance (infeasible operating point).
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Byte-stream transport failed (timeout, broken connection, refused).
struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Peer violated the wire protocol (bad frame, wrong sequence, handshake mismatch).
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Online decision and independent recheck disagree; indicates an integration bug.
struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// FNV-1a 64-bit hash, used for scenario digests in the handshake.
constexpr std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Shortest round-trip decimal form of a double, locale-independent.
std::string format_double(double v);

}  // namespace islesim
