#include "mdlinfer/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mdlinfer/errors.hpp"
#include "mdlinfer/optimize.hpp"

namespace mdlinfer {

namespace {

// Fit state over the included statistics, with the theta-independent null
// log densities cached once per fit.
struct Working {
    const StatFamily* family = nullptr;
    std::vector<const ReducedStatistic*> stats;
    std::vector<double> null_ld;
    double theta_hi = 0.0;

    size_t size() const { return stats.size(); }
};

Working make_working(const StatFamily& family, const std::vector<ReducedStatistic>& stats,
                     std::optional<size_t> exclude, double theta_max) {
    Working w;
    w.family = &family;
    for (size_t j = 0; j < stats.size(); ++j) {
        if (exclude && *exclude == j) continue;
        w.stats.push_back(&stats[j]);
    }
    if (w.size() < 2)
        throw InputError("mixture fit needs at least two statistics after exclusion");
    w.null_ld.resize(w.size());
    w.theta_hi = theta_max;
    for (size_t j = 0; j < w.size(); ++j) {
        w.null_ld[j] = log_density(family, family.theta0, *w.stats[j]);
        if (!(theta_max > 0.0)) w.theta_hi = std::max(w.theta_hi, default_theta_max(*w.stats[j]));
    }
    return w;
}

std::vector<double> alt_densities(const Working& w, double theta) {
    std::vector<double> ld(w.size());
    for (size_t j = 0; j < w.size(); ++j) ld[j] = log_density(*w.family, theta, *w.stats[j]);
    return ld;
}

double loglik_at(const Working& w, const std::vector<double>& alt_ld, double pi0) {
    const double lp0 = std::log(pi0);
    const double lp1 = std::log1p(-pi0);
    std::vector<double> terms(w.size());
    for (size_t j = 0; j < w.size(); ++j)
        terms[j] = logaddexp(lp0 + w.null_ld[j], lp1 + alt_ld[j]);
    return sum_sorted(terms);
}

// One coordinate-ascent run; returns the attained (theta, pi0, loglik).
struct Point {
    double theta;
    double pi0;
    double loglik;
};

Point ascend(const Working& w, double theta, double pi0, const MixtureOptions& opts,
             const std::vector<double>& theta_grid) {
    double cur = loglik_at(w, alt_densities(w, theta), pi0);
    for (int it = 0; it < 60; ++it) {
        // theta step at fixed pi0 (skipped on the flat ridge pi0 = 1, where
        // the likelihood does not depend on theta)
        if (pi0 < 1.0) {
            auto neg = [&](double t) { return -loglik_at(w, alt_densities(w, t), pi0); };
            const MinimizeResult r = scan_golden_min(neg, theta_grid, opts.x_tol, opts.max_iter);
            if (-r.fx >= cur) theta = r.x;
        }

        // pi0 step at fixed theta: the likelihood is concave in pi0, so one
        // golden search plus the two endpoints finds the global maximizer
        const std::vector<double> alt_ld = alt_densities(w, theta);
        auto neg_pi = [&](double p) { return -loglik_at(w, alt_ld, p); };
        const MinimizeResult g = golden_min(neg_pi, 0.0, 1.0, opts.x_tol, opts.max_iter);
        double best_p = g.x;
        double best_v = g.fx;
        for (const double p : {0.0, 1.0}) {
            const double v = neg_pi(p);
            if (v < best_v) {
                best_v = v;
                best_p = p;
            }
        }
        // A tie against pi0 = 1 means the alternative component adds nothing
        // (theta sitting on theta0 makes the likelihood flat in pi0). Report
        // such fits in the pure-null parameterization so degeneracy is visible.
        if (best_p < 1.0) {
            const double v1 = neg_pi(1.0);
            if (v1 <= best_v + 1e-9 * std::max(1.0, std::fabs(best_v))) {
                best_p = 1.0;
                best_v = v1;
            }
        }
        pi0 = best_p;

        const double nxt = -best_v;
        if (nxt - cur <= 1e-10 * std::max(1.0, std::fabs(nxt)) && it > 0) {
            cur = std::max(cur, nxt);
            break;
        }
        cur = nxt;
    }
    return {theta, pi0, cur};
}

}  // namespace

double mixture_loglik(const StatFamily& family, double theta, double pi0,
                      const std::vector<ReducedStatistic>& stats) {
    if (!family.contains(theta)) throw std::invalid_argument("theta outside the family domain");
    if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw std::invalid_argument("pi0 must lie in [0, 1]");
    const double lp0 = std::log(pi0);
    const double lp1 = std::log1p(-pi0);
    std::vector<double> terms(stats.size());
    for (size_t j = 0; j < stats.size(); ++j) {
        const double l0 = log_density(family, family.theta0, stats[j]);
        const double la = log_density(family, theta, stats[j]);
        terms[j] = logaddexp(lp0 + l0, lp1 + la);
    }
    return sum_sorted(terms);
}

MixtureFit fit_mixture(const StatFamily& family, const std::vector<ReducedStatistic>& stats,
                       std::optional<size_t> exclude, const MixtureOptions& opts) {
    const Working w = make_working(family, stats, exclude, opts.theta_max);
    const std::vector<double> grid = family.kind == FamilyKind::folded_t
                                         ? log_scan_grid(w.theta_hi, opts.coarse_points)
                                         : symmetric_log_scan_grid(w.theta_hi, opts.coarse_points);

    std::vector<std::pair<double, double>> starts;
    if (opts.start) {
        starts.push_back(*opts.start);
    } else {
        for (const double f : {0.15, 0.4, 0.65, 0.9})
            for (const double p : {0.3, 0.7}) starts.emplace_back(f * w.theta_hi, p);
    }

    Point best{family.theta0, 1.0, -std::numeric_limits<double>::infinity()};
    for (const auto& [th0, pi0] : starts) {
        const double th = std::clamp(th0, family.theta_lo(), w.theta_hi);
        const Point p = ascend(w, th, std::clamp(pi0, 0.0, 1.0), opts, grid);
        if (p.loglik > best.loglik) best = p;
    }
    if (!std::isfinite(best.loglik)) throw OptimizerFailure("mixture fit found no finite likelihood");

    MixtureFit fit;
    fit.excluded = exclude;
    fit.pi0 = best.pi0;
    fit.theta_alt = best.theta;
    fit.loglik = best.loglik;
    if (best.pi0 > 1.0 - 1.0 / (2.0 * static_cast<double>(w.size()))) {
        fit.non_identifiable = true;
        fit.theta_alt = family.theta0;
        fit.loglik = loglik_at(w, alt_densities(w, fit.theta_alt), fit.pi0);
    }
    return fit;
}

LfdrResult lfdr(const StatFamily& family, const MixtureFit& fit, const ReducedStatistic& stat) {
    const double l0 = log_density(family, family.theta0, stat);
    const double la = log_density(family, fit.theta_alt, stat);
    // log odds of the null component; +-inf at the pi0 endpoints
    double odds;
    if (fit.pi0 <= 0.0)
        odds = -std::numeric_limits<double>::infinity();
    else if (fit.pi0 >= 1.0)
        odds = std::numeric_limits<double>::infinity();
    else
        odds = std::log(fit.pi0) - std::log1p(-fit.pi0) + l0 - la;

    LfdrResult r;
    r.feature_id = stat.feature_id;
    r.lfdr = 1.0 / (1.0 + std::exp(-odds));
    r.mixture_delta = odds / kLn2;
    return r;
}

}  // namespace mdlinfer
