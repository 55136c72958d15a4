#pragma once

#include <functional>
#include <vector>

#include "mdlinfer/statistics.hpp"

// Independent reference computations the tests compare the library against.
// Everything here favors directness over speed.
namespace oracles {

// Noncentral-t log density by adaptive quadrature of the defining integral
// over the scale mixture variable (peak-scaled, Gauss-Kronrod). Shares no
// code with the library's series evaluation.
double log_nct_pdf(double t, double df, double delta);
double log_folded_nct_pdf(double t, double df, double delta);

// Third-party special-function reference; accurate away from deep tails.
double boost_log_nct_pdf(double t, double df, double delta);

// Adaptive quadrature of f over [a, b]; endpoints may be infinite.
double integrate(const std::function<double(double)>& f, double a, double b);

// Exhaustive-grid maximizers of sum_j max(log g_theta(T_j), log g_theta0(T_j))
// over theta in {lo, lo+step, ..., theta_max}: the pooled argmax and each
// leave-one-out argmax, from one shared evaluation table.
struct GridCodeOracle {
    double pooled = 0.0;
    std::vector<double> loo;
};
GridCodeOracle grid_code_oracle(const mdlinfer::StatFamily& family,
                                const std::vector<mdlinfer::ReducedStatistic>& stats, double step,
                                double theta_max);

// Brute-force maximizer of the two-component mixture log-likelihood over a
// (theta, pi0) lattice.
struct GridMixtureFit {
    double theta = 0.0;
    double pi0 = 1.0;
    double loglik = 0.0;
};
GridMixtureFit grid_mixture_fit(const mdlinfer::StatFamily& family,
                                const std::vector<mdlinfer::ReducedStatistic>& stats,
                                double theta_step, double pi_step, double theta_max);

// Two-sample Kolmogorov-Smirnov test at significance 0.01.
struct KsResult {
    double statistic = 0.0;
    double threshold = 0.0;
    bool reject = false;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

double median(std::vector<double> v);

// Mean of |T| for central t with df > 1 degrees of freedom.
double folded_central_t_mean(double df);

}  // namespace oracles
