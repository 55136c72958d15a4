#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mdlinfer/errors.hpp"

namespace mdlinfer {

struct OptimOptions {
    int coarse_points = 64;   // scan grid size
    double x_tol = 1e-6;      // golden-section bracket width at exit
    int max_iter = 200;
};

struct MinimizeResult {
    double x = 0.0;
    double fx = 0.0;
    bool nonunique = false;  // several scan points tied at the global minimum
};

// Scan grid on [0, hi]: zero plus points log-spaced over [hi*1e-4, hi].
std::vector<double> log_scan_grid(double hi, int n);

// Symmetric grid on [-hi, hi]: zero plus mirrored log-spaced halves.
std::vector<double> symmetric_log_scan_grid(double hi, int n);

// Golden-section minimization on [a, b]; assumes f is continuous. Converges
// to a local minimum of the bracket for piecewise-smooth objectives too.
template <class F>
MinimizeResult golden_min(F&& f, double a, double b, double x_tol, int max_iter = 200) {
    constexpr double invphi = 0.61803398874989484820;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    MinimizeResult r;
    if (f1 <= f2) {
        r.x = x1;
        r.fx = f1;
    } else {
        r.x = x2;
        r.fx = f2;
    }
    return r;
}

// Refinement step shared by the scan-based minimizers: given scan values fx
// at sorted `points`, pick the best point (ties resolve to the smallest x by
// deterministic left-to-right strict improvement), flag widely separated
// near-ties as nonunique, then golden-refine the surrounding bracket. With
// top_m > 1, the brackets of the top_m best non-adjacent scan points are all
// refined and the overall best kept: kinked objectives can hide the global
// minimum in a bracket whose scan sample was not the scan winner.
// Throws OptimizerFailure if no scan value is finite.
template <class F>
MinimizeResult refine_scan_min(F&& f, const std::vector<double>& points,
                               const std::vector<double>& fx, double x_tol, int max_iter = 200,
                               int top_m = 1) {
    const size_t n = points.size();
    size_t best = n;
    for (size_t i = 0; i < n; ++i)
        if (std::isfinite(fx[i]) && (best == n || fx[i] < fx[best])) best = i;
    if (best == n) throw OptimizerFailure("scan found no finite objective value");

    bool nonunique = false;
    const double f_tie = 1e-9 * std::max(1.0, std::fabs(fx[best]));
    for (size_t i = 0; i < n; ++i) {
        if (i == best || !std::isfinite(fx[i])) continue;
        const double spacing =
            std::max(points[std::min(i + 1, n - 1)] - points[i], points[i] - points[i ? i - 1 : 0]);
        if (fx[i] - fx[best] <= f_tie && std::fabs(points[i] - points[best]) > 2.0 * spacing + x_tol)
            nonunique = true;
    }

    std::vector<size_t> order;
    order.reserve(n);
    for (size_t i = 0; i < n; ++i)
        if (std::isfinite(fx[i])) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return fx[a] != fx[b] ? fx[a] < fx[b] : a < b;
    });
    std::vector<size_t> cands;
    for (const size_t idx : order) {
        bool adjacent = false;
        for (const size_t c : cands) adjacent = adjacent || (idx + 1 >= c && idx <= c + 1);
        if (!adjacent) cands.push_back(idx);
        if (cands.size() >= static_cast<size_t>(std::max(1, top_m))) break;
    }

    MinimizeResult r;
    r.x = points[best];
    r.fx = fx[best];  // never return worse than the scan winner
    for (const size_t cidx : cands) {
        const double lo = points[cidx > 0 ? cidx - 1 : 0];
        const double hi = points[std::min(cidx + 1, n - 1)];
        if (hi - lo <= x_tol) continue;
        const MinimizeResult g = golden_min(f, lo, hi, x_tol, max_iter);
        if (g.fx < r.fx || (g.fx == r.fx && g.x < r.x)) {
            r.x = g.x;
            r.fx = g.fx;
        }
    }
    r.nonunique = nonunique;
    return r;
}

// Coarse scan over `points` (sorted ascending) followed by golden-section
// refinement of the bracket around the best point.
template <class F>
MinimizeResult scan_golden_min(F&& f, const std::vector<double>& points, double x_tol,
                               int max_iter = 200) {
    std::vector<double> fx(points.size());
    for (size_t i = 0; i < points.size(); ++i) fx[i] = f(points[i]);
    return refine_scan_min(f, points, fx, x_tol, max_iter);
}

}  // namespace mdlinfer
