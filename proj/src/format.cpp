#include "cascaderisk/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "cascaderisk/error.hpp"

namespace cascaderisk {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw InvariantError("format_double: to_chars failed");
  return std::string(buf.data(), ptr);
}

double parse_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw InputError(what + ": not a number: '" + text + "'");
  }
  return value;
}

}  // namespace cascaderisk
