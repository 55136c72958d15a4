#include "mdlinfer/optimize.hpp"

#include <cmath>

namespace mdlinfer {

std::vector<double> log_scan_grid(double hi, int n) {
    std::vector<double> pts;
    pts.reserve(n);
    pts.push_back(0.0);
    const int m = n - 1;
    const double lo = hi * 1e-4;
    for (int i = 0; i < m; ++i)
        pts.push_back(lo * std::pow(hi / lo, m == 1 ? 1.0 : double(i) / (m - 1)));
    pts.back() = hi;
    return pts;
}

std::vector<double> symmetric_log_scan_grid(double hi, int n) {
    const int half = (n - 1) / 2;
    std::vector<double> pts;
    pts.reserve(2 * half + 1);
    const double lo = hi * 1e-4;
    for (int i = half - 1; i >= 0; --i)
        pts.push_back(-lo * std::pow(hi / lo, half == 1 ? 1.0 : double(i) / (half - 1)));
    pts.push_back(0.0);
    for (int i = 0; i < half; ++i)
        pts.push_back(lo * std::pow(hi / lo, half == 1 ? 1.0 : double(i) / (half - 1)));
    pts.front() = -hi;
    pts.back() = hi;
    return pts;
}

}  // namespace mdlinfer
