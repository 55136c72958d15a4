#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdlinfer/numeric.hpp"
#include "mdlinfer/statistics.hpp"

namespace mdlinfer {

// Joint maximum-likelihood fit of the two-component mixture
// pi0 * g_theta0 + (1 - pi0) * g_theta_alt over the reduced statistics.
struct MixtureFit {
    double theta_alt = 0.0;
    double pi0 = 1.0;
    double loglik = 0.0;  // nats, attained at (theta_alt, pi0)
    std::optional<size_t> excluded;
    // The likelihood is flat in theta when pi0 sits against 1; theta_alt is
    // then pinned to theta0 and this flag raised instead of reporting a
    // meaningless parameter.
    bool non_identifiable = false;
};

struct LfdrResult {
    std::string feature_id;
    double lfdr = 1.0;            // null-component posterior weight at T
    double mixture_delta = 0.0;   // bits, log2(lfdr / (1 - lfdr))
};

struct MixtureOptions {
    // Upper bound of the theta search; 0 derives it from the statistics.
    double theta_max = 0.0;
    int coarse_points = 64;
    double x_tol = 1e-6;
    int max_iter = 200;
    // Single (theta, pi0) starting point replacing the default multistart
    // lattice; used to warm-start leave-one-out refits from the pooled fit.
    std::optional<std::pair<double, double>> start;
};

// Mixture log-likelihood in nats: sum over stats of
// log[pi0 * g_theta0(T_j) + (1 - pi0) * g_theta(T_j)], log-domain stabilized.
// pi0 of exactly 0 or 1 collapses to the corresponding pure component.
double mixture_loglik(const StatFamily& family, double theta, double pi0,
                      const std::vector<ReducedStatistic>& stats);

// Maximizes mixture_loglik over theta in the family domain and pi0 in [0,1]
// by alternating coordinate ascent from a lattice of starting points (or the
// configured warm start). With exclude set, that statistic is left out.
// Needs at least two statistics after exclusion.
MixtureFit fit_mixture(const StatFamily& family, const std::vector<ReducedStatistic>& stats,
                       std::optional<size_t> exclude = std::nullopt,
                       const MixtureOptions& opts = {});

// Posterior weight of the null component at one statistic under a fitted
// mixture, with the information for discrimination it implies.
LfdrResult lfdr(const StatFamily& family, const MixtureFit& fit, const ReducedStatistic& stat);

}  // namespace mdlinfer
