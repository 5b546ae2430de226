#pragma once

#include <charconv>
#include <initializer_list>
#include <string>

namespace fbl {

/// Shortest round-trip text for a double.
inline std::string format_number(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

/// Comma-separated line with a trailing newline.
inline std::string csv_row(std::initializer_list<double> values) {
  std::string line;
  for (double v : values) {
    if (!line.empty()) line += ',';
    line += format_number(v);
  }
  line += '\n';
  return line;
}

}  // namespace fbl
