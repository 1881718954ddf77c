#pragma once

#include <cstdint>
#include <string>

namespace gx {

// Shortest round-trip form is not used on purpose: reports carry exactly 17
// significant digits, '.' decimal, independent of the locale.
std::string format_double(double x);

// Parses a double written by format_double (or any plain decimal/exponent
// form). Throws ConfigError on trailing garbage.
double parse_double(const std::string& s);
std::uint64_t parse_u64(const std::string& s);

}  // namespace gx
