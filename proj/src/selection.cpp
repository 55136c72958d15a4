#include "mdlinfer/selection.hpp"

#include <cmath>
#include <stdexcept>

#include "mdlinfer/errors.hpp"

namespace mdlinfer {

double null_proportion(const std::vector<double>& deltas, std::optional<size_t> exclude,
                       const SelectionOptions& opts) {
    size_t count = 0;
    size_t total = 0;
    for (size_t j = 0; j < deltas.size(); ++j) {
        if (exclude && *exclude == j) continue;
        ++total;
        if (deltas[j] >= 0.0) ++count;
    }
    if (total == 0) throw EmptyAfterExclusion("no deltas left to count after exclusion");
    if (opts.laplace_smoothing)
        return (static_cast<double>(count) + 0.5) / (static_cast<double>(total) + 1.0);
    return static_cast<double>(count) / static_cast<double>(total);
}

SelectionResult select(const FeatureCode& code, double p_null) {
    if (!(p_null >= 0.0 && p_null <= 1.0))
        throw std::invalid_argument("p_null must lie in [0, 1]");
    SelectionResult r;
    r.feature_id = code.feature_id;
    r.p_null = p_null;
    // log2(p/(1-p)) evaluates to -inf at p=0 and +inf at p=1, which are the
    // documented endpoint codelengths; no smoothing here.
    r.total_delta = code.delta + std::log2(p_null / (1.0 - p_null));
    r.posterior_null = 1.0 / (1.0 + std::exp2(-r.total_delta));
    r.selected = r.total_delta >= 0.0 ? Selected::null_model : Selected::alternative;
    return r;
}

std::vector<SelectionResult> run_selection(const std::vector<FeatureCode>& codes,
                                           CodingScheme scheme, const SelectionOptions& opts) {
    std::vector<double> deltas(codes.size());
    for (size_t j = 0; j < codes.size(); ++j) deltas[j] = codes[j].delta;

    std::vector<SelectionResult> out;
    out.reserve(codes.size());
    if (scheme == CodingScheme::approx) {
        const double pooled = null_proportion(deltas, std::nullopt, opts);
        for (const auto& code : codes) out.push_back(select(code, pooled));
    } else {
        for (size_t i = 0; i < codes.size(); ++i)
            out.push_back(select(codes[i], null_proportion(deltas, i, opts)));
    }
    return out;
}

}  // namespace mdlinfer
