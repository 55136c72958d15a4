#pragma once

namespace mdlinfer {

// Natural-log density of the noncentral Student t distribution with df
// degrees of freedom and noncentrality delta, evaluated at t.
//
// When t and delta have the same sign the density is evaluated with an
// all-positive-term series in the log domain, stable for df up to ~1e3 and
// |delta| up to ~40. When the signs disagree the series alternates and
// cancels catastrophically, so the defining scale-mixture integral (which is
// log-concave in the mixing variable) is integrated instead. Underflow never
// yields -inf for finite arguments: the result is a finite large-negative
// value.
double log_nct_pdf(double t, double df, double delta);

// Natural-log density of |T| where T is noncentral t. Requires t >= 0 and
// delta >= 0. The folded series keeps only even-order terms, so it is
// all-positive for any sign combination folded over.
double log_folded_nct_pdf(double t, double df, double delta);

}  // namespace mdlinfer
