#pragma once

#include <charconv>
#include <string>

namespace hpasp {

/// Shortest decimal text that reads back to exactly `v`.
inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

} // namespace hpasp
