#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mdlinfer/errors.hpp"
#include "mdlinfer/optimize.hpp"

namespace mdlinfer {

// One feature's raw two-group measurements.
struct FeatureSample {
    std::string feature_id;
    std::vector<double> group_x;
    std::vector<double> group_y;
};

// The scalar reduction T(x) of one feature plus the metadata needed to
// evaluate its density: degrees of freedom m+n-2 and the scale
// (1/m + 1/n)^{-1/2} that multiplies theta to give the noncentrality.
struct ReducedStatistic {
    std::string feature_id;
    double value = 0.0;
    int df = 0;
    double scale = 1.0;
};

enum class FamilyKind : uint8_t { signed_t, folded_t };

// One-parameter family theta -> g_theta of reduced-data densities with known
// null point theta0. signed_t covers the two-sample t statistic
// (theta ranges over all reals); folded_t covers its absolute value
// (theta >= 0).
struct StatFamily {
    FamilyKind kind = FamilyKind::folded_t;
    double theta0 = 0.0;

    double theta_lo() const {
        return kind == FamilyKind::folded_t ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    double theta_hi() const { return std::numeric_limits<double>::infinity(); }
    bool contains(double theta) const { return theta >= theta_lo() && theta <= theta_hi(); }

    static StatFamily folded() { return {FamilyKind::folded_t, 0.0}; }
    static StatFamily signed_family() { return {FamilyKind::signed_t, 0.0}; }
};

// Two independent binomial counts; the log-odds difference is the parameter
// of interest and s = x1 + x2 is conditioned away.
struct BinomialPair {
    long x1 = 0;
    long x2 = 0;
    long n1 = 1;
    long n2 = 1;
};

// Two-sample t statistic with the pooled unbiased variance estimate.
// Throws SampleTooSmall (m < 2 or n < 2) and ZeroVariance (all values
// identical up to machine precision).
ReducedStatistic two_sample_t(const FeatureSample& sample);

// |T| of the above; identical df and scale.
ReducedStatistic abs_two_sample_t(const FeatureSample& sample);

// Natural-log density of the reduced statistic under g_theta. For signed_t
// this is the noncentral t density at delta = scale * theta; for folded_t it
// is the density of |T| under the same noncentrality. Throws DomainError if
// theta lies outside the family's parameter space (or the statistic is
// negative for folded_t).
double log_density(const StatFamily& family, double theta, const ReducedStatistic& stat);

struct MleOptions {
    // Upper end of the parameter search; 0 means derive it from the
    // statistic as max(10, (|T| + 6) / scale).
    double theta_max = 0.0;
    OptimOptions optim;
};

// Search bound used throughout when none is configured.
double default_theta_max(const ReducedStatistic& stat);

// Per-feature maximum-likelihood parameter: argmax of log_density over the
// family's parameter space, via coarse scan plus golden-section refinement.
double feature_mle(const StatFamily& family, const ReducedStatistic& stat,
                   const MleOptions& opts = {});

// Conditional log-likelihood theta*x1 - log K(theta) of two binomials given
// s = x1 + x2, with K summed over the attainable first count.
double binomial_conditional_loglik(double theta, const BinomialPair& data);

}  // namespace mdlinfer
