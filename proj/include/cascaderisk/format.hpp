#pragma once

#include <string>

namespace cascaderisk {

// Shortest decimal representation that parses back to the same double.
// Non-finite values are written as "nan", "inf" and "-inf".
std::string format_double(double value);

// Strict full-string parse; throws InputError naming `what` on failure.
double parse_double(const std::string& text, const std::string& what);

}  // namespace cascaderisk
