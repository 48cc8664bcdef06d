#pragma once

#include <charconv>
#include <string>
#include <string_view>

namespace ile {

// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;  // to_chars cannot fail with this buffer size
  return std::string(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

}  // namespace ile
