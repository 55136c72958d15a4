#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdlinfer/statistics.hpp"

namespace mdlinfer {

// Records whether the shift-and-log transform has been applied, so a second
// application can be refused instead of silently compounding.
struct PreprocessLog {
    bool applied = false;
    double shift = 0.0;      // first quartile of the pooled second-group values
    std::string transform;   // human-readable description, e.g. "ln(value + shift)"
};

struct Dataset {
    std::vector<FeatureSample> features;
    std::string name_x;  // first group label (cases)
    std::string name_y;  // second group label (controls)
    PreprocessLog preprocessing;
};

// Column names and group labels for the long-format input CSV
// (one row per measurement: feature id, group label, value).
struct IngestConfig {
    std::string feature_col = "feature_id";
    std::string group_col = "group";
    std::string value_col = "value";
    std::string group_x;
    std::string group_y;
};

// Parses a long-format CSV with a header row. Rows whose group label matches
// neither configured group are ignored. Malformed rows are collected and
// reported together in one ParseError (with line numbers), never dropped
// silently. Throws GroupTooSmall if any feature ends up with fewer than two
// values in either group, IoError if the file cannot be read.
Dataset ingest_csv(const std::string& path, const IngestConfig& config);
Dataset ingest_csv_text(const std::string& text, const IngestConfig& config,
                        const std::string& origin = "<memory>");

// Structural checks for programmatically built datasets: unique feature ids
// (DuplicateFeatureId), at least two values per group (GroupTooSmall),
// finite values.
void validate_dataset(const Dataset& ds);

// Shifts every value by the first quartile of the pooled second-group values
// and takes natural logarithms: v -> ln(v + Q1). Quartile convention is
// linear interpolation of order statistics (the widespread type-7 rule).
// Throws NonPositiveAfterShift listing entries with v + Q1 <= 0, and
// AlreadyPreprocessed on a second invocation.
Dataset preprocess(const Dataset& raw);

struct SyntheticTruth {
    Dataset dataset;
    std::vector<bool> is_null;  // true labels, for test harnesses
};

// Two-groups normal draws: each feature is null (both groups standard
// normal) with probability pi0, otherwise the first group's mean is shifted
// by theta_alt standard deviations with a random sign. Deterministic given
// the seed.
SyntheticTruth generate_synthetic(size_t n_features, size_t m, size_t n, double pi0,
                                  double theta_alt, uint64_t seed);

}  // namespace mdlinfer
