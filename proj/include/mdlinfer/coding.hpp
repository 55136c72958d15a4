#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mdlinfer/numeric.hpp"
#include "mdlinfer/optimize.hpp"
#include "mdlinfer/statistics.hpp"

namespace mdlinfer {

// Per-feature statistics plus their cached alternative-model MLEs, the common
// input to both coding schemes. Invariants: stats and mles are parallel
// arrays, every mle lies in the family domain, and there are at least two
// features (the exact code needs at least one other feature to fit on).
struct CodingInput {
    StatFamily family;
    std::vector<ReducedStatistic> stats;
    std::vector<double> mles;

    size_t size() const { return stats.size(); }
};

struct CodingOptions {
    // Upper bound for the code parameter scan; 0 means derive it from the
    // data as the largest per-feature bound.
    double theta_max = 0.0;
    // The pooled objective is piecewise (a sum of clipped regrets), so it
    // gets a denser coarse scan than a single smooth log-likelihood would.
    int coarse_points = 256;
    double x_tol = 1e-6;
    int max_iter = 200;
    LogBase base = LogBase::bits;
};

// One feature's codelength accounting under a fixed code parameter.
// All lengths and regrets are in the reporting base of the options that
// produced them. delta = regret_alt - regret_null, so positive values favor
// the null model.
struct FeatureCode {
    std::string feature_id;
    double null_len = 0.0;
    double alt_len = 0.0;
    double theta_alt = 0.0;
    double regret_alt = 0.0;
    double regret_null = 0.0;
    double delta = 0.0;
};

// Result of the pooled (plug-in) code: one shared parameter for all features.
struct ApproxCode {
    double theta = 0.0;
    std::vector<FeatureCode> codes;
    bool nonunique = false;
    // Set when no parameter beats coding every feature with the null model;
    // theta is then pinned to the null value.
    bool degenerate_alternative = false;
};

// Result of the leave-one-out code: feature i is coded with the parameter
// fitted on all other features.
struct ExactCode {
    std::vector<double> thetas;
    std::vector<FeatureCode> codes;
    bool nonunique = false;
    bool degenerate_alternative = false;
};

// Builds the coding input by fitting each feature's MLE. Throws InputError
// if fewer than two features are given.
CodingInput make_coding_input(const StatFamily& family, std::vector<ReducedStatistic> stats,
                              const CodingOptions& opts = {});

// Excess codelength of coding `stat` with parameter theta_code instead of its
// own MLE: log g_mle(T) - log g_theta(T), converted to `base`. Nonnegative up
// to optimizer tolerance whenever mle is the true maximizer.
double regret(const StatFamily& family, double theta_code, const ReducedStatistic& stat,
              double mle, LogBase base = LogBase::bits);

// Pooled coding objective: sum over features j (skipping `exclude` if given)
// of min(regret(theta, j), regret(theta0, j)). The minimizers of this
// objective are the code parameters of both schemes.
double regret_sum_objective(const StatFamily& family, double theta,
                            const std::vector<ReducedStatistic>& stats,
                            const std::vector<double>& mles,
                            std::optional<size_t> exclude = std::nullopt,
                            LogBase base = LogBase::bits);

ApproxCode approx_code(const CodingInput& input, const CodingOptions& opts = {});

ExactCode exact_code(const CodingInput& input, const CodingOptions& opts = {});

}  // namespace mdlinfer
