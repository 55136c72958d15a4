#include "mdlinfer/statistics.hpp"

#include <cmath>
#include <numeric>

#include "mdlinfer/nct.hpp"
#include "mdlinfer/numeric.hpp"

namespace mdlinfer {
namespace {

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double sum_sq_dev(const std::vector<double>& v, double m) {
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s;
}

void check_sample(const FeatureSample& s) {
    if (s.group_x.size() < 2 || s.group_y.size() < 2)
        throw SampleTooSmall("feature '" + s.feature_id + "': both groups need at least 2 values");
    for (double v : s.group_x)
        if (!std::isfinite(v))
            throw std::invalid_argument("feature '" + s.feature_id + "': non-finite measurement");
    for (double v : s.group_y)
        if (!std::isfinite(v))
            throw std::invalid_argument("feature '" + s.feature_id + "': non-finite measurement");
}

}  // namespace

ReducedStatistic two_sample_t(const FeatureSample& sample) {
    check_sample(sample);
    const double m = double(sample.group_x.size());
    const double n = double(sample.group_y.size());
    const double mx = mean(sample.group_x);
    const double my = mean(sample.group_y);
    const double pooled_var = (sum_sq_dev(sample.group_x, mx) + sum_sq_dev(sample.group_y, my)) / (m + n - 2.0);

    double max_abs = 0.0;
    for (double v : sample.group_x) max_abs = std::max(max_abs, std::fabs(v));
    for (double v : sample.group_y) max_abs = std::max(max_abs, std::fabs(v));
    const double eps = std::numeric_limits<double>::epsilon();
    if (!(std::sqrt(pooled_var) > 8.0 * eps * max_abs))
        throw ZeroVariance("feature '" + sample.feature_id + "': pooled variance is zero");

    ReducedStatistic r;
    r.feature_id = sample.feature_id;
    r.df = int(m + n) - 2;
    r.scale = 1.0 / std::sqrt(1.0 / m + 1.0 / n);
    r.value = (mx - my) / (std::sqrt(pooled_var) * std::sqrt(1.0 / m + 1.0 / n));
    return r;
}

ReducedStatistic abs_two_sample_t(const FeatureSample& sample) {
    ReducedStatistic r = two_sample_t(sample);
    r.value = std::fabs(r.value);
    return r;
}

double log_density(const StatFamily& family, double theta, const ReducedStatistic& stat) {
    if (!family.contains(theta))
        throw DomainError("theta " + format_double(theta) + " outside the parameter space");
    if (family.kind == FamilyKind::folded_t) {
        if (stat.value < 0.0)
            throw DomainError("folded statistic must be nonnegative");
        return log_folded_nct_pdf(stat.value, stat.df, stat.scale * theta);
    }
    return log_nct_pdf(stat.value, stat.df, stat.scale * theta);
}

double default_theta_max(const ReducedStatistic& stat) {
    return std::max(10.0, (std::fabs(stat.value) + 6.0) / stat.scale);
}

double feature_mle(const StatFamily& family, const ReducedStatistic& stat, const MleOptions& opts) {
    const double hi = opts.theta_max > 0.0 ? opts.theta_max : default_theta_max(stat);
    const auto grid = family.kind == FamilyKind::folded_t
                          ? log_scan_grid(hi, opts.optim.coarse_points)
                          : symmetric_log_scan_grid(hi, opts.optim.coarse_points);
    auto neg_ld = [&](double th) { return -log_density(family, th, stat); };
    return scan_golden_min(neg_ld, grid, opts.optim.x_tol, opts.optim.max_iter).x;
}

double binomial_conditional_loglik(double theta, const BinomialPair& data) {
    if (data.n1 < 1 || data.n2 < 1 || data.x1 < 0 || data.x2 < 0 || data.x1 > data.n1 ||
        data.x2 > data.n2)
        throw std::invalid_argument("binomial pair: need 0 <= x1 <= n1 and 0 <= x2 <= n2");
    if (!std::isfinite(theta)) throw std::invalid_argument("binomial pair: non-finite theta");

    auto lchoose = [](long n, long k) {
        return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
               std::lgamma(double(n - k) + 1.0);
    };
    const long s = data.x1 + data.x2;
    const long j_lo = std::max(0L, s - data.n2);
    const long j_hi = std::min(data.n1, s);
    double log_k = -std::numeric_limits<double>::infinity();
    for (long j = j_lo; j <= j_hi; ++j)
        log_k = logaddexp(log_k, lchoose(data.n1, j) + lchoose(data.n2, s - j) + double(j) * theta);
    // the observed-count coefficients normalize the conditional pmf; a
    // codelength needs the actual probability, not the likelihood shape
    return lchoose(data.n1, data.x1) + lchoose(data.n2, data.x2) + theta * double(data.x1) - log_k;
}

}  // namespace mdlinfer
