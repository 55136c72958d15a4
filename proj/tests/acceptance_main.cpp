// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mdlinfer/coding.hpp"
#include "mdlinfer/dataset.hpp"
#include "mdlinfer/mixture.hpp"
#include "mdlinfer/numeric.hpp"
#include "mdlinfer/report.hpp"
#include "mdlinfer/selection.hpp"
#include "mdlinfer/statistics.hpp"
#include "support/oracles.hpp"

using namespace mdlinfer;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

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

// 1. Folded density normalization over (df, delta) in {3,10,50} x {0,1,3}.
Outcome criterion_density_normalization() {
    const double t0 = now_s();
    const StatFamily fam = StatFamily::folded();
    double worst = 0.0;
    std::string worst_at;
    for (const int df : {3, 10, 50}) {
        for (const double delta : {0.0, 1.0, 3.0}) {
            ReducedStatistic s;
            s.feature_id = "x";
            s.df = df;
            s.scale = 1.0;  // unit scale makes theta the noncentrality itself
            auto pdf = [&](double t) {
                s.value = t;
                return std::exp(log_density(fam, delta, s));
            };
            const double cuts[] = {0.0, 1.0, 5.0, 15.0, 40.0, 200.0, 2000.0, 20000.0};
            double total = 0.0;
            for (size_t k = 0; k + 1 < sizeof(cuts) / sizeof(cuts[0]); ++k)
                total += oracles::integrate(pdf, cuts[k], cuts[k + 1]);
            const double err = std::fabs(total - 1.0);
            if (err > worst) {
                worst = err;
                worst_at = "df=" + std::to_string(df) + " delta=" + format_double(delta);
            }
        }
    }
    const double elapsed = now_s() - t0;
    Outcome o;
    o.pass = worst <= 1e-6 && elapsed < 10.0;
    o.detail = "max |integral - 1| = " + format_double(worst) + " at " + worst_at + ", " +
               format_double(elapsed) + " s";
    return o;
}

// Shared state for criteria 2 and 3 (one oracle table serves both).
struct CodeOracleRun {
    double worst_pooled = 0.0;
    double worst_loo = 0.0;
    double elapsed = 0.0;
};

const CodeOracleRun& code_oracle_run() {
    static const CodeOracleRun r = [] {
        CodeOracleRun out;
        const double t0 = now_s();
        const StatFamily fam = StatFamily::folded();
        for (uint64_t seed = 1; seed <= 20; ++seed) {
            const CodingInput in = make_coding_input(fam, synthetic_stats(20, 8, 8, 0.5, 2.0, seed));
            const ApproxCode ac = approx_code(in);
            const ExactCode ec = exact_code(in);
            const oracles::GridCodeOracle oracle =
                oracles::grid_code_oracle(fam, in.stats, 1e-3, data_theta_max(in.stats));
            out.worst_pooled = std::max(out.worst_pooled, std::fabs(ac.theta - oracle.pooled));
            for (size_t i = 0; i < in.size(); ++i)
                out.worst_loo = std::max(out.worst_loo, std::fabs(ec.thetas[i] - oracle.loo[i]));
        }
        out.elapsed = now_s() - t0;
        return out;
    }();
    return r;
}

// 2. Pooled code parameter vs the exhaustive-grid constrained MLE, 20 seeds.
Outcome criterion_pooled_oracle() {
    const CodeOracleRun& r = code_oracle_run();
    Outcome o;
    o.pass = r.worst_pooled <= 1e-3 && r.elapsed < 60.0;
    o.detail = "max |pooled - oracle| = " + format_double(r.worst_pooled) + ", " +
               format_double(r.elapsed) + " s (shared with criterion 3)";
    return o;
}

// 3. Every leave-one-out code parameter vs its grid oracle, same seeds.
Outcome criterion_loo_oracle() {
    const CodeOracleRun& r = code_oracle_run();
    Outcome o;
    o.pass = r.worst_loo <= 1e-3;
    o.detail = "max_i |loo - oracle| = " + format_double(r.worst_loo);
    return o;
}

// 4. max_i |pooled - loo_i| shrinks with N: non-increasing chain in >= 8/10
//    seeds and the N=200 median below a quarter of the N=20 median.
Outcome criterion_convergence_trend() {
    const StatFamily fam = StatFamily::folded();
    const size_t sizes[] = {20, 50, 100, 200};
    std::vector<std::vector<double>> gaps(4);
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        for (size_t k = 0; k < 4; ++k) {
            const CodingInput in =
                make_coding_input(fam, synthetic_stats(sizes[k], 8, 8, 0.5, 2.0, seed));
            const ApproxCode ac = approx_code(in);
            const ExactCode ec = exact_code(in);
            double gap = 0.0;
            for (const double th : ec.thetas) gap = std::max(gap, std::fabs(ac.theta - th));
            gaps[k].push_back(gap);
        }
    }
    int monotone = 0;
    for (size_t s = 0; s < 10; ++s)
        if (gaps[0][s] >= gaps[1][s] && gaps[1][s] >= gaps[2][s] && gaps[2][s] >= gaps[3][s])
            ++monotone;
    const double med20 = oracles::median(gaps[0]);
    const double med200 = oracles::median(gaps[3]);
    Outcome o;
    o.pass = monotone >= 8 && med200 < 0.25 * med20;
    o.detail = "non-increasing in " + std::to_string(monotone) + "/10 seeds, median gap " +
               format_double(med20) + " (N=20) -> " + format_double(med200) + " (N=200)";
    return o;
}

// 5. P(delta <= -J) <= 2^-J + 3 SE under the null for a pre-fixed code.
Outcome criterion_misleading_evidence() {
    const double t0 = now_s();
    const StatFamily fam = StatFamily::folded();
    const double theta_fixed = 2.0;
    const size_t n_draws = 100000;
    const int df = 14;  // m = n = 8
    std::mt19937_64 rng(777);
    std::student_t_distribution<double> tdist(df);
    ReducedStatistic s;
    s.feature_id = "x";
    s.df = df;
    s.scale = 2.0;  // two groups of 8: (1/8 + 1/8)^(-1/2)
    std::vector<size_t> exceed(5, 0);
    for (size_t k = 0; k < n_draws; ++k) {
        s.value = std::fabs(tdist(rng));
        const double delta_bits =
            (log_density(fam, fam.theta0, s) - log_density(fam, theta_fixed, s)) / kLn2;
        for (size_t j = 0; j < exceed.size(); ++j)
            if (delta_bits <= -double(j + 1)) ++exceed[j];
    }
    bool ok = true;
    std::string detail;
    for (size_t j = 0; j < exceed.size(); ++j) {
        const double bound = std::exp2(-double(j + 1));
        const double se = std::sqrt(bound * (1.0 - bound) / double(n_draws));
        const double rate = double(exceed[j]) / double(n_draws);
        ok = ok && rate <= bound + 3.0 * se;
        detail += (j ? ", " : "") + std::string("J=") + std::to_string(j + 1) + ": " +
                  format_double(rate) + "<=" + format_double(bound + 3.0 * se);
    }
    const double elapsed = now_s() - t0;
    Outcome o;
    o.pass = ok && elapsed < 60.0;
    o.detail = detail + ", " + format_double(elapsed) + " s";
    return o;
}

// 6. Posterior identity for 1000 random (delta, p_null) pairs.
Outcome criterion_posterior_identity() {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> delta_dist(-30.0, 30.0);
    std::uniform_real_distribution<double> p_dist(0.01, 0.99);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double delta = delta_dist(rng);
        const double p = p_dist(rng);
        FeatureCode c;
        c.feature_id = "x";
        c.delta = delta;
        const SelectionResult r = select(c, p);
        const double odds = (p / (1.0 - p)) * std::exp2(delta);
        const double direct = odds / (1.0 + odds);
        worst = std::max(worst, std::fabs(r.posterior_null - direct) / direct);
    }
    Outcome o;
    o.pass = worst <= 1e-12;
    o.detail = "max relative error = " + format_double(worst);
    return o;
}

// 7. Mixture fit vs a (1e-2, 1e-2) 2-D grid oracle on 10 seeds.
Outcome criterion_mixture_oracle() {
    const StatFamily fam = StatFamily::folded();
    double worst_theta = 0.0, worst_pi = 0.0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        const std::vector<ReducedStatistic> stats = synthetic_stats(20, 8, 8, 0.5, 2.0, 600 + seed);
        const MixtureFit fit = fit_mixture(fam, stats);
        const oracles::GridMixtureFit oracle =
            oracles::grid_mixture_fit(fam, stats, 1e-2, 1e-2, data_theta_max(stats));
        worst_theta = std::max(worst_theta, std::fabs(fit.theta_alt - oracle.theta));
        worst_pi = std::max(worst_pi, std::fabs(fit.pi0 - oracle.pi0));
    }
    Outcome o;
    o.pass = worst_theta <= 2e-2 && worst_pi <= 2e-2;
    o.detail = "max |theta - oracle| = " + format_double(worst_theta) + ", max |pi0 - oracle| = " +
               format_double(worst_pi);
    return o;
}

// 8. Mixture calibration: N=200, pi0=0.7, theta_alt=2.5, 20 seeds.
Outcome criterion_mixture_calibration() {
    const StatFamily fam = StatFamily::folded();
    std::vector<double> pi_err, theta_err;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        const std::vector<ReducedStatistic> stats = synthetic_stats(200, 8, 8, 0.7, 2.5, 800 + seed);
        const MixtureFit fit = fit_mixture(fam, stats);
        pi_err.push_back(std::fabs(fit.pi0 - 0.7));
        theta_err.push_back(std::fabs(fit.theta_alt - 2.5));
    }
    const double med_pi = oracles::median(pi_err);
    const double med_theta = oracles::median(theta_err);
    Outcome o;
    o.pass = med_pi < 0.1 && med_theta < 0.4;
    o.detail = "median |pi0 - 0.7| = " + format_double(med_pi) + ", median |theta - 2.5| = " +
               format_double(med_theta);
    return o;
}

// 9. Byte-identical reports across runs; csv emit -> ingest -> emit fixpoint.
Outcome criterion_determinism_roundtrip() {
    SyntheticTruth st = generate_synthetic(20, 8, 8, 0.5, 2.0, 900);
    RunConfig cfg;
    cfg.scheme = Scheme::all;
    const AnalysisReport rep = run(st.dataset, cfg);
    const std::string text1 = report_csv_text(rep);
    const std::string text2 = report_csv_text(run(st.dataset, cfg));

    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / ("mdlinfer_accept_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const auto files = emit(rep, EmitFormat::csv, dir.string());
    const AnalysisReport back = load_report_csv(files.at(0));
    const std::string text3 = report_csv_text(back);
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);

    Outcome o;
    o.pass = text1 == text2 && text1 == text3;
    o.detail = std::string("repeat run ") + (text1 == text2 ? "identical" : "DIFFERS") +
               ", emit/load/emit " + (text1 == text3 ? "fixpoint" : "DIFFERS");
    return o;
}

// 10. Checked-in example through all three schemes matches the committed
//     expected report byte for byte.
Outcome criterion_end_to_end_example() {
    const double t0 = now_s();
    const std::string src = MDLINFER_SOURCE_DIR;
    IngestConfig icfg;
    icfg.group_x = "case";
    icfg.group_y = "control";
    const Dataset raw = ingest_csv(src + "/data/example.csv", icfg);
    const Dataset ds = preprocess(raw);
    RunConfig cfg;
    cfg.scheme = Scheme::all;
    const std::string got = report_csv_text(run(ds, cfg));

    std::ifstream in(src + "/data/expected_report.csv", std::ios::binary);
    std::string want((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const double elapsed = now_s() - t0;
    Outcome o;
    o.pass = in.good() && !want.empty() && got == want && elapsed < 30.0;
    o.detail = (got == want ? "byte-identical to committed report" : "OUTPUT DIFFERS") + (", " +
               format_double(elapsed) + " s");
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*fn)();
    };
    const Criterion criteria[] = {
        {"density normalization", criterion_density_normalization},
        {"pooled-code grid-oracle equivalence", criterion_pooled_oracle},
        {"leave-one-out grid-oracle equivalence", criterion_loo_oracle},
        {"pooled/leave-one-out convergence trend", criterion_convergence_trend},
        {"misleading-evidence bound", criterion_misleading_evidence},
        {"posterior identity", criterion_posterior_identity},
        {"mixture grid-oracle equivalence", criterion_mixture_oracle},
        {"mixture calibration", criterion_mixture_calibration},
        {"determinism and round-trip", criterion_determinism_roundtrip},
        {"end-to-end example", criterion_end_to_end_example},
    };
    int failures = 0;
    for (size_t i = 0; i < sizeof(criteria) / sizeof(criteria[0]); ++i) {
        Outcome o;
        try {
            o = criteria[i].fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %zu (%s): %s [%s]\n", i + 1, criteria[i].name,
                    o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures ? 1 : 0;
}
