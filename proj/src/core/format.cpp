#include "gauss_extrema/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "gauss_extrema/errors.hpp"

namespace gx {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    if (res.ec != std::errc()) throw InternalError("number formatting failed");
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) throw ConfigError("not a number: '" + s + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t v = 0;
    const char* last = s.data() + s.size();
    auto res = std::from_chars(s.data(), last, v);
    if (res.ec != std::errc() || res.ptr != last) throw ConfigError("not an unsigned integer: '" + s + "'");
    return v;
}

}  // namespace gx
