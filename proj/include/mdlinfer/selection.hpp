#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdlinfer/coding.hpp"

namespace mdlinfer {

enum class Selected : uint8_t { null_model, alternative };

enum class CodingScheme : uint8_t { exact, approx };

struct SelectionOptions {
    // Add-half smoothing of the null-selection proportion. Off by default:
    // the exact counting formulas allow p_null of 0 or 1, whose codelengths
    // are the documented infinities.
    bool laplace_smoothing = false;
};

// Two-part codelength comparison for one feature. total_delta adds the
// parameter-value codelength difference log2(p_null/(1-p_null)) to the
// data codelength difference; positive values select the null model.
struct SelectionResult {
    std::string feature_id;
    double p_null = 0.0;
    double total_delta = 0.0;  // bits; +-inf when p_null hits an endpoint
    double posterior_null = 0.0;
    Selected selected = Selected::null_model;
};

// Fraction of included deltas that are >= 0 (ties count as null). With
// exclude set, that feature's delta is left out of the count. Throws
// EmptyAfterExclusion when nothing remains.
double null_proportion(const std::vector<double>& deltas,
                       std::optional<size_t> exclude = std::nullopt,
                       const SelectionOptions& opts = {});

// Combines one feature's code with a parameter distribution over
// {theta0, alternative}. posterior_null = 1 / (1 + 2^(-total_delta)).
SelectionResult select(const FeatureCode& code, double p_null);

// exact scheme: each feature gets the leave-one-out proportion over the
// other features' deltas. approx scheme: one pooled proportion over all
// deltas is shared by every feature.
std::vector<SelectionResult> run_selection(const std::vector<FeatureCode>& codes,
                                           CodingScheme scheme,
                                           const SelectionOptions& opts = {});

}  // namespace mdlinfer
