#pragma once

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

#include <charconv>
#include <string>
#include <system_error>

namespace wdscreen {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace wdscreen
