#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace mdlinfer {

inline constexpr double kLn2 = 0.69314718055994530941723212145818;

// Reporting base for codelengths. Everything is computed in nats internally
// and converted at the reporting boundary.
enum class LogBase { bits, nats };

inline double from_nats(double nats, LogBase base) {
    return base == LogBase::bits ? nats / kLn2 : nats;
}

// base^x for the configured base (2^x or e^x).
inline double base_exp(double x, LogBase base) {
    return base == LogBase::bits ? std::exp2(x) : std::exp(x);
}

// log(exp(a) + exp(b)) with -inf treated as an absent branch.
inline double logaddexp(double a, double b) {
    if (std::isinf(a) && a < 0) return b;
    if (std::isinf(b) && b < 0) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// Order-independent sum: sorting makes the result invariant under any
// permutation of the inputs, which keeps per-feature outputs bit-identical
// when the feature list is reordered. Consumes the buffer.
inline double sum_sorted(std::vector<double>& buf) {
    std::sort(buf.begin(), buf.end());
    double s = 0.0;
    for (double v : buf) s += v;
    return s;
}

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Shortest round-trip decimal formatting (used for all emitted numbers so
// that emit -> parse -> emit is a byte-level fixpoint).
std::string format_double(double x);

// Parses what format_double writes, including "inf"/"-inf"/"nan".
double parse_double(const std::string& s, bool& ok);

}  // namespace mdlinfer
