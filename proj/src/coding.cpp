#include "mdlinfer/coding.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mdlinfer/errors.hpp"

namespace mdlinfer {

namespace {

// Per-feature log densities in nats, shared by both schemes so that repeated
// objective evaluations only recompute the theta-dependent term.
struct DensityCache {
    std::vector<double> null_ld;     // log g_theta0(T_j)
    std::vector<double> mle_ld;      // log g_mle_j(T_j)
    std::vector<double> null_regret; // mle_ld - null_ld
};

DensityCache build_cache(const CodingInput& in) {
    const size_t n = in.size();
    DensityCache c;
    c.null_ld.resize(n);
    c.mle_ld.resize(n);
    c.null_regret.resize(n);
    for (size_t j = 0; j < n; ++j) {
        c.null_ld[j] = log_density(in.family, in.family.theta0, in.stats[j]);
        c.mle_ld[j] = log_density(in.family, in.mles[j], in.stats[j]);
        c.null_regret[j] = c.mle_ld[j] - c.null_ld[j];
    }
    return c;
}

// min(regret under theta, regret under theta0) for feature j, in nats.
double clipped_regret(const CodingInput& in, const DensityCache& c, double theta, size_t j) {
    const double r = c.mle_ld[j] - log_density(in.family, theta, in.stats[j]);
    return std::min(r, c.null_regret[j]);
}

std::vector<double> scan_points(const CodingInput& in, const CodingOptions& opts) {
    double hi = opts.theta_max;
    if (!(hi > 0.0)) {
        hi = 0.0;
        for (const auto& s : in.stats) hi = std::max(hi, default_theta_max(s));
    }
    return in.family.kind == FamilyKind::folded_t ? log_scan_grid(hi, opts.coarse_points)
                                                  : symmetric_log_scan_grid(hi, opts.coarse_points);
}

void check_parallel(const CodingInput& in) {
    if (in.stats.size() != in.mles.size())
        throw std::invalid_argument("coding input stats and mles differ in length");
    if (in.stats.empty()) throw InputError("coding input has no features");
}

std::vector<FeatureCode> build_codes(const CodingInput& in, const DensityCache& c,
                                     const std::vector<double>& thetas, LogBase base) {
    std::vector<FeatureCode> out(in.size());
    for (size_t i = 0; i < in.size(); ++i) {
        const double alt_ld = log_density(in.family, thetas[i], in.stats[i]);
        FeatureCode& fc = out[i];
        fc.feature_id = in.stats[i].feature_id;
        fc.null_len = from_nats(-c.null_ld[i], base);
        fc.alt_len = from_nats(-alt_ld, base);
        fc.theta_alt = thetas[i];
        fc.regret_alt = from_nats(c.mle_ld[i] - alt_ld, base);
        fc.regret_null = from_nats(c.null_regret[i], base);
        fc.delta = fc.regret_alt - fc.regret_null;
    }
    return out;
}

// Absolute tolerance used to decide that the optimum does not beat coding
// everything with the null model (degenerate alternative).
double degenerate_tol(double null_sum) { return 1e-9 * std::max(1.0, std::fabs(null_sum)); }

// The clipped-regret sum is piecewise smooth with one kink per feature, so
// near-tied minima in neighboring brackets are common; refine this many of
// the best non-adjacent scan brackets before choosing.
constexpr int kRefineBrackets = 4;

}  // namespace

CodingInput make_coding_input(const StatFamily& family, std::vector<ReducedStatistic> stats,
                              const CodingOptions& opts) {
    if (stats.size() < 2)
        throw InputError("coding needs at least two features, got " + std::to_string(stats.size()));
    CodingInput in;
    in.family = family;
    in.stats = std::move(stats);
    in.mles.resize(in.stats.size());
    MleOptions mo;
    mo.theta_max = opts.theta_max;
    mo.optim.x_tol = opts.x_tol;
    mo.optim.max_iter = opts.max_iter;
    for (size_t j = 0; j < in.stats.size(); ++j) in.mles[j] = feature_mle(family, in.stats[j], mo);
    return in;
}

double regret(const StatFamily& family, double theta_code, const ReducedStatistic& stat,
              double mle, LogBase base) {
    const double r = log_density(family, mle, stat) - log_density(family, theta_code, stat);
    return from_nats(r, base);
}

double regret_sum_objective(const StatFamily& family, double theta,
                            const std::vector<ReducedStatistic>& stats,
                            const std::vector<double>& mles, std::optional<size_t> exclude,
                            LogBase base) {
    if (stats.size() != mles.size())
        throw std::invalid_argument("regret_sum_objective stats and mles differ in length");
    std::vector<double> terms;
    terms.reserve(stats.size());
    for (size_t j = 0; j < stats.size(); ++j) {
        if (exclude && *exclude == j) continue;
        terms.push_back(std::min(regret(family, theta, stats[j], mles[j], base),
                                 regret(family, family.theta0, stats[j], mles[j], base)));
    }
    return sum_sorted(terms);
}

ApproxCode approx_code(const CodingInput& in, const CodingOptions& opts) {
    check_parallel(in);
    const DensityCache c = build_cache(in);
    const std::vector<double> grid = scan_points(in, opts);

    auto objective = [&](double theta) {
        std::vector<double> terms(in.size());
        for (size_t j = 0; j < in.size(); ++j) terms[j] = clipped_regret(in, c, theta, j);
        return sum_sorted(terms);
    };

    std::vector<double> fx(grid.size());
    for (size_t k = 0; k < grid.size(); ++k) fx[k] = objective(grid[k]);
    const MinimizeResult r =
        refine_scan_min(objective, grid, fx, opts.x_tol, opts.max_iter, kRefineBrackets);

    const double null_sum = objective(in.family.theta0);
    ApproxCode out;
    out.nonunique = r.nonunique;
    if (r.fx >= null_sum - degenerate_tol(null_sum)) {
        out.theta = in.family.theta0;
        out.degenerate_alternative = true;
    } else {
        out.theta = r.x;
    }
    out.codes = build_codes(in, c, std::vector<double>(in.size(), out.theta), opts.base);
    return out;
}

ExactCode exact_code(const CodingInput& in, const CodingOptions& opts) {
    check_parallel(in);
    const size_t n = in.size();
    if (n < 2) throw InputError("leave-one-out coding needs at least two features");
    const DensityCache c = build_cache(in);
    const std::vector<double> grid = scan_points(in, opts);
    const size_t K = grid.size();

    // Shared scan table: the leave-one-out objective at a grid point is the
    // pooled row sum minus that feature's own term, so all n coarse scans
    // cost one table of density evaluations.
    std::vector<std::vector<double>> term(K, std::vector<double>(n));
    std::vector<double> row_sum(K);
    size_t k_null = K;
    for (size_t k = 0; k < K; ++k) {
        for (size_t j = 0; j < n; ++j) term[k][j] = clipped_regret(in, c, grid[k], j);
        std::vector<double> buf = term[k];
        row_sum[k] = sum_sorted(buf);
        if (grid[k] == in.family.theta0) k_null = k;
    }

    // Pooled minimizer doubles as a warm-start candidate for every
    // leave-one-out search.
    auto pooled_objective = [&](double theta) {
        std::vector<double> terms(n);
        for (size_t j = 0; j < n; ++j) terms[j] = clipped_regret(in, c, theta, j);
        return sum_sorted(terms);
    };
    const MinimizeResult pooled = refine_scan_min(pooled_objective, grid, row_sum, opts.x_tol,
                                                  opts.max_iter, kRefineBrackets);

    ExactCode out;
    out.thetas.resize(n);
    for (size_t i = 0; i < n; ++i) {
        auto loo_objective = [&](double theta) {
            std::vector<double> terms;
            terms.reserve(n - 1);
            for (size_t j = 0; j < n; ++j)
                if (j != i) terms.push_back(clipped_regret(in, c, theta, j));
            return sum_sorted(terms);
        };

        std::vector<double> points = grid;
        std::vector<double> values(K);
        for (size_t k = 0; k < K; ++k) values[k] = row_sum[k] - term[k][i];
        const auto pos = std::lower_bound(points.begin(), points.end(), pooled.x);
        if (pos == points.end() || *pos != pooled.x) {
            const size_t idx = static_cast<size_t>(pos - points.begin());
            points.insert(points.begin() + idx, pooled.x);
            values.insert(values.begin() + idx, loo_objective(pooled.x));
        }

        const MinimizeResult ri = refine_scan_min(loo_objective, points, values, opts.x_tol,
                                                  opts.max_iter, kRefineBrackets);
        out.nonunique = out.nonunique || ri.nonunique;

        double theta_i = ri.x;
        if (k_null < K) {
            const double null_sum_i = row_sum[k_null] - term[k_null][i];
            if (ri.fx >= null_sum_i - degenerate_tol(null_sum_i)) {
                theta_i = in.family.theta0;
                out.degenerate_alternative = true;
            }
        }
        out.thetas[i] = theta_i;
    }

    out.codes = build_codes(in, c, out.thetas, opts.base);
    return out;
}

}  // namespace mdlinfer
