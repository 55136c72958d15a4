#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdlinfer/dataset.hpp"
#include "mdlinfer/mixture.hpp"
#include "mdlinfer/selection.hpp"

namespace mdlinfer {

enum class Scheme : uint8_t { exact, approx, mixture, all };

struct RunConfig {
    Scheme scheme = Scheme::all;
    FamilyKind family = FamilyKind::folded_t;
    // Refuse raw (untransformed) datasets unless explicitly allowed.
    bool allow_raw = false;
    LogBase base = LogBase::bits;
    double x_tol = 1e-6;
    double theta_max = 0.0;  // 0 derives the bound from the data
    bool laplace_smoothing = false;
};

// One feature's results. A nonempty error string marks a feature that could
// not be analyzed; all optional fields of such a row stay empty while the
// rest of the batch proceeds.
struct ReportRow {
    std::string feature_id;
    std::string error;
    std::optional<double> statistic;
    std::optional<int> df;
    std::optional<double> scale;
    std::optional<double> theta_mle;
    std::optional<double> null_len;
    std::optional<double> regret_null;

    std::optional<double> theta_exact;
    std::optional<double> alt_len_exact;
    std::optional<double> regret_exact;
    std::optional<double> delta_exact;
    std::optional<double> p_null_exact;
    std::optional<double> total_delta_exact;
    std::optional<double> posterior_null_exact;
    std::optional<std::string> selected_exact;

    std::optional<double> alt_len_approx;
    std::optional<double> regret_approx;
    std::optional<double> delta_approx;
    std::optional<double> total_delta_approx;
    std::optional<double> posterior_null_approx;
    std::optional<std::string> selected_approx;

    std::optional<double> lfdr;
    std::optional<double> mixture_delta;
};

struct ReportGlobals {
    std::string spec_version = "1";
    std::string scheme = "all";
    std::string family = "folded_t";
    std::string base = "bits";
    std::string group_x;
    std::string group_y;
    bool preprocessed = false;
    std::optional<double> shift;
    std::optional<std::string> transform;

    std::optional<double> theta_approx;    // shared code parameter
    std::optional<double> p_null_approx;   // pooled null-selection proportion
    std::optional<bool> approx_degenerate;
    std::optional<bool> approx_nonunique;
    std::optional<bool> exact_degenerate;
    std::optional<bool> exact_nonunique;

    std::optional<double> theta_mix;
    std::optional<double> pi0_mix;
    std::optional<double> mix_loglik;
    std::optional<bool> mix_non_identifiable;
};

struct AnalysisReport {
    ReportGlobals globals;
    std::vector<ReportRow> rows;
    // Wall-clock breakdown per scheme. Kept out of emitted files: emitted
    // reports must be byte-identical across repeated runs.
    std::map<std::string, double> timings_ms;
};

// Runs the requested schemes over the dataset with per-feature error
// isolation. Throws InputError when the dataset is raw without allow_raw or
// fewer than two features are analyzable.
AnalysisReport run(const Dataset& ds, const RunConfig& config = {});

enum class EmitFormat : uint8_t { csv, jsonl, plotdata };

// Writes the report under out_dir and returns the written paths.
//   csv      -> report.csv ('#'-prefixed key=value globals, then rows)
//   jsonl    -> report.jsonl (one row object per line) + report_globals.json
//   plotdata -> two-column plot_*.csv files + plot_manifest.json naming each
//               file's figure analogue and explaining omissions
std::vector<std::string> emit(const AnalysisReport& report, EmitFormat format,
                              const std::string& out_dir);

// The exact byte content of report.csv; emit(csv) writes this.
std::string report_csv_text(const AnalysisReport& report);

// Parses a report.csv back into a report (fields round-trip exactly).
AnalysisReport load_report_csv(const std::string& path);
AnalysisReport parse_report_csv(const std::string& text);

}  // namespace mdlinfer
