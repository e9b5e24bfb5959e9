#include "islesim/common.hpp"

#include <charconv>

namespace islesim {

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace islesim
