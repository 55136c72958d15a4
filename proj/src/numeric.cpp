#include "mdlinfer/numeric.hpp"

#include <charconv>
#include <cmath>

namespace mdlinfer {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, ptr);
}

double parse_double(const std::string& s, bool& ok) {
    ok = false;
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (s == "nan") {
        ok = true;
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (s == "inf") {
        ok = true;
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
        ok = true;
        return -std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    ok = (ec == std::errc() && ptr == s.data() + s.size());
    return ok ? v : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace mdlinfer
