#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mdlinfer/coding.hpp"
#include "mdlinfer/dataset.hpp"
#include "mdlinfer/errors.hpp"
#include "mdlinfer/numeric.hpp"
#include "support/oracles.hpp"

using namespace mdlinfer;

namespace {

ReducedStatistic stat_of(const std::string& id, double value, int df, double scale) {
    ReducedStatistic s;
    s.feature_id = id;
    s.value = value;
    s.df = df;
    s.scale = scale;
    return s;
}

std::vector<ReducedStatistic> synthetic_stats(size_t n_features, size_t m, size_t n, double pi0,
                                              double theta_alt, uint64_t seed) {
    const SyntheticTruth st = generate_synthetic(n_features, m, n, pi0, theta_alt, seed);
    std::vector<ReducedStatistic> out;
    out.reserve(n_features);
    for (const FeatureSample& f : st.dataset.features) out.push_back(abs_two_sample_t(f));
    return out;
}

double data_theta_max(const std::vector<ReducedStatistic>& stats) {
    double hi = 0.0;
    for (const auto& s : stats) hi = std::max(hi, default_theta_max(s));
    return hi;
}

}  // namespace

TEST_SUITE("coding") {

TEST_CASE("regret vanishes at the MLE and at the null for a null-looking statistic") {
    const StatFamily fam = StatFamily::folded();
    const ReducedStatistic s = stat_of("a", 2.0, 4, 1.0);
    const double mle = feature_mle(fam, s);
    CHECK(regret(fam, mle, s, mle) == 0.0);

    const ReducedStatistic at_zero = stat_of("b", 0.0, 4, 1.0);
    const double mle0 = feature_mle(fam, at_zero);
    CHECK(std::fabs(mle0) < 1e-9);
    CHECK(std::fabs(regret(fam, fam.theta0, at_zero, mle0)) < 1e-9);
}

TEST_CASE("null regret matches an independent density-ratio evaluation") {
    const StatFamily fam = StatFamily::folded();
    const ReducedStatistic s = stat_of("a", 2.0, 4, 1.0);
    const double mle = feature_mle(fam, s);
    const double expected =
        (oracles::log_folded_nct_pdf(2.0, 4.0, mle) - oracles::log_folded_nct_pdf(2.0, 4.0, 0.0)) /
        kLn2;
    CHECK(regret(fam, 0.0, s, mle) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("regret sum objective trivial values") {
    const StatFamily fam = StatFamily::folded();
    std::vector<ReducedStatistic> stats = {stat_of("a", 0.8, 10, 1.5), stat_of("b", 2.6, 10, 1.5),
                                           stat_of("c", 1.4, 8, 2.0)};
    std::vector<double> mles;
    for (const auto& s : stats) mles.push_back(feature_mle(fam, s));

    double null_sum = 0.0;
    for (size_t j = 0; j < stats.size(); ++j)
        null_sum += regret(fam, fam.theta0, stats[j], mles[j]);
    CHECK(regret_sum_objective(fam, fam.theta0, stats, mles) ==
          doctest::Approx(null_sum).epsilon(1e-12));

    const std::vector<ReducedStatistic> one = {stats[0]};
    const std::vector<double> one_mle = {mles[0]};
    CHECK(regret_sum_objective(fam, 1.0, one, one_mle, size_t{0}) == 0.0);
}

TEST_CASE("optimized objective value is no worse than an exhaustive grid") {
    const StatFamily fam = StatFamily::folded();
    const std::vector<ReducedStatistic> stats = {
        stat_of("a", 0.4, 12, 1.8), stat_of("b", 3.1, 12, 1.8), stat_of("c", 2.2, 12, 1.8),
        stat_of("d", 0.9, 12, 1.8), stat_of("e", 4.0, 12, 1.8)};
    const CodingInput in = make_coding_input(fam, stats);
    const ApproxCode ac = approx_code(in);

    const double hi = data_theta_max(stats);
    double grid_min = std::numeric_limits<double>::infinity();
    for (long k = 0; k <= std::lround(hi / 1e-3); ++k)
        grid_min = std::min(grid_min,
                            regret_sum_objective(fam, 1e-3 * double(k), in.stats, in.mles));
    const double at_opt = regret_sum_objective(fam, ac.theta, in.stats, in.mles);
    CHECK(at_opt <= grid_min + 1e-9);
}

TEST_CASE("identical statistics make the pooled parameter the common MLE") {
    const StatFamily fam = StatFamily::folded();
    std::vector<ReducedStatistic> stats;
    for (int i = 0; i < 6; ++i) stats.push_back(stat_of("f" + std::to_string(i), 2.4, 9, 1.2));
    const CodingInput in = make_coding_input(fam, stats);
    const ApproxCode ac = approx_code(in);
    CHECK_FALSE(ac.degenerate_alternative);
    CHECK(std::fabs(ac.theta - in.mles[0]) < 1e-4);
    for (const FeatureCode& c : ac.codes) CHECK(std::fabs(c.regret_alt) < 1e-6);
}

TEST_CASE("all-tiny statistics degenerate to the null parameter") {
    const StatFamily fam = StatFamily::folded();
    const std::vector<ReducedStatistic> stats = {
        stat_of("a", 0.05, 10, 2.0), stat_of("b", 0.12, 10, 2.0), stat_of("c", 0.30, 10, 2.0),
        stat_of("d", 0.21, 10, 2.0)};
    const CodingInput in = make_coding_input(fam, stats);
    const ApproxCode ac = approx_code(in);
    CHECK(ac.degenerate_alternative);
    CHECK(ac.theta == fam.theta0);
    for (const FeatureCode& c : ac.codes) {
        CHECK(c.delta >= -1e-9);
        CHECK(std::fabs(c.delta) < 1e-9);  // alt code collapses onto the null code
    }
}

TEST_CASE("pooled parameter matches the constrained-MLE grid oracle") {
    const std::vector<ReducedStatistic> stats = synthetic_stats(20, 8, 8, 0.5, 2.0, 101);
    const StatFamily fam = StatFamily::folded();
    const CodingInput in = make_coding_input(fam, stats);
    const ApproxCode ac = approx_code(in);
    const oracles::GridCodeOracle oracle =
        oracles::grid_code_oracle(fam, in.stats, 1e-3, data_theta_max(in.stats));
    CHECK(std::fabs(ac.theta - oracle.pooled) <= 1e-3);
}

TEST_CASE("leave-one-out parameters match the grid oracle for every feature") {
    const std::vector<ReducedStatistic> stats = synthetic_stats(20, 8, 8, 0.5, 2.0, 202);
    const StatFamily fam = StatFamily::folded();
    const CodingInput in = make_coding_input(fam, stats);
    const ExactCode ec = exact_code(in);
    const oracles::GridCodeOracle oracle =
        oracles::grid_code_oracle(fam, in.stats, 1e-3, data_theta_max(in.stats));
    for (size_t i = 0; i < stats.size(); ++i) {
        CAPTURE(i);
        CHECK(std::fabs(ec.thetas[i] - oracle.loo[i]) <= 1e-3);
    }
}

TEST_CASE("two features: each exact parameter is the other feature's MLE") {
    const StatFamily fam = StatFamily::folded();
    const std::vector<ReducedStatistic> stats = {stat_of("a", 2.5, 8, 1.0),
                                                 stat_of("b", 0.9, 8, 1.0)};
    const CodingInput in = make_coding_input(fam, stats);
    const ExactCode ec = exact_code(in);
    CHECK(std::fabs(ec.thetas[0] - in.mles[1]) < 1e-3);
    CHECK(std::fabs(ec.thetas[1] - in.mles[0]) < 1e-3);
}

TEST_CASE("pooled and leave-one-out parameters drift together as N grows") {
    const StatFamily fam = StatFamily::folded();
    auto max_gap = [&](size_t n_features, uint64_t seed) {
        const std::vector<ReducedStatistic> stats = synthetic_stats(n_features, 8, 8, 0.5, 2.0, seed);
        const CodingInput in = make_coding_input(fam, stats);
        const ApproxCode ac = approx_code(in);
        const ExactCode ec = exact_code(in);
        double gap = 0.0;
        for (const double th : ec.thetas) gap = std::max(gap, std::fabs(ac.theta - th));
        return gap;
    };
    CHECK(max_gap(100, 7) < max_gap(20, 7));
}

TEST_CASE("outputs are invariant to input order") {
    const StatFamily fam = StatFamily::folded();
    const std::vector<ReducedStatistic> stats = synthetic_stats(12, 6, 6, 0.5, 2.0, 303);
    const CodingInput in = make_coding_input(fam, stats);

    std::vector<size_t> perm(stats.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = (i + 5) % perm.size();
    CodingInput shuffled;
    shuffled.family = fam;
    shuffled.stats.resize(stats.size());
    shuffled.mles.resize(stats.size());
    for (size_t i = 0; i < perm.size(); ++i) {
        shuffled.stats[perm[i]] = in.stats[i];
        shuffled.mles[perm[i]] = in.mles[i];
    }

    const ApproxCode a1 = approx_code(in);
    const ApproxCode a2 = approx_code(shuffled);
    CHECK(a1.theta == a2.theta);
    CHECK(a1.degenerate_alternative == a2.degenerate_alternative);
    const ExactCode e1 = exact_code(in);
    const ExactCode e2 = exact_code(shuffled);
    for (size_t i = 0; i < perm.size(); ++i) {
        CHECK(a2.codes[perm[i]].delta == a1.codes[i].delta);
        CHECK(a2.codes[perm[i]].alt_len == a1.codes[i].alt_len);
        CHECK(e2.thetas[perm[i]] == e1.thetas[i]);
        CHECK(e2.codes[perm[i]].delta == e1.codes[i].delta);
        CHECK(e2.codes[perm[i]].regret_alt == e1.codes[i].regret_alt);
    }
}

TEST_CASE("regrets are nonnegative and the delta identity holds") {
    const std::vector<ReducedStatistic> stats = synthetic_stats(25, 8, 8, 0.6, 2.0, 404);
    const StatFamily fam = StatFamily::folded();
    const CodingInput in = make_coding_input(fam, stats);
    const ApproxCode ac = approx_code(in);
    const ExactCode ec = exact_code(in);
    for (const auto* codes : {&ac.codes, &ec.codes}) {
        for (const FeatureCode& c : *codes) {
            CHECK(c.regret_alt >= -1e-9);
            CHECK(c.regret_null >= -1e-9);
            CHECK(c.delta == c.regret_alt - c.regret_null);
            CHECK(std::fabs(c.delta - (c.alt_len - c.null_len)) < 1e-9);
        }
    }
}

TEST_CASE("misleading evidence under the null is rare, small version") {
    // code density fixed in advance; draws come straight from the null statistic law
    const StatFamily fam = StatFamily::folded();
    const double theta_fixed = 2.0;
    const int df = 14;
    const size_t n_draws = 20000;
    std::mt19937_64 rng(99);
    std::student_t_distribution<double> tdist(df);
    ReducedStatistic s = stat_of("x", 0.0, df, 1.0);
    std::vector<size_t> exceed(3, 0);
    for (size_t k = 0; k < n_draws; ++k) {
        s.value = std::fabs(tdist(rng));
        const double delta_bits =
            (log_density(fam, fam.theta0, s) - log_density(fam, theta_fixed, s)) / kLn2;
        for (size_t j = 0; j < exceed.size(); ++j)
            if (delta_bits <= -double(j + 1)) ++exceed[j];
    }
    for (size_t j = 0; j < exceed.size(); ++j) {
        const double bound = std::exp2(-double(j + 1));
        const double se = std::sqrt(bound * (1.0 - bound) / double(n_draws));
        CAPTURE(j);
        CHECK(double(exceed[j]) / double(n_draws) <= bound + 3.0 * se);
    }
}

}  // TEST_SUITE
