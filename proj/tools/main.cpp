#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdlinfer/errors.hpp"
#include "mdlinfer/numeric.hpp"
#include "mdlinfer/report.hpp"

namespace {

using namespace mdlinfer;

Scheme scheme_from(const std::string& s) {
    if (s == "exact") return Scheme::exact;
    if (s == "approx") return Scheme::approx;
    if (s == "mixture") return Scheme::mixture;
    return Scheme::all;
}

EmitFormat format_from(const std::string& s) {
    if (s == "csv") return EmitFormat::csv;
    if (s == "jsonl") return EmitFormat::jsonl;
    return EmitFormat::plotdata;
}

struct AnalyzeArgs {
    std::string input;
    std::string group_x = "case";
    std::string group_y = "control";
    std::string scheme = "all";
    std::string family = "folded";
    std::string preprocess = "on";
    std::string log_base = "2";
    std::string smoothing = "off";
    std::vector<std::string> formats = {"csv"};
    double tol = 1e-6;
    double theta_max = 0.0;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::size_t synth_features = 20;
    std::size_t synth_m = 8;
    std::size_t synth_n = 8;
    double synth_pi0 = 0.5;
    double synth_theta_alt = 2.0;
};

struct SynthArgs {
    std::size_t n_features = 20;
    std::size_t m = 8;
    std::size_t n = 8;
    double pi0 = 0.5;
    double theta_alt = 2.0;
    std::uint64_t seed = 1;
    std::string out = "synthetic.csv";
    std::string truth_out;
};

int run_analyze(const AnalyzeArgs& a) {
    Dataset ds;
    if (a.input == "synthetic") {
        ds = generate_synthetic(a.synth_features, a.synth_m, a.synth_n, a.synth_pi0,
                                a.synth_theta_alt, a.seed)
                 .dataset;
    } else {
        IngestConfig ic;
        ic.group_x = a.group_x;
        ic.group_y = a.group_y;
        ds = ingest_csv(a.input, ic);
        if (a.preprocess == "on") ds = preprocess(ds);
    }

    RunConfig rc;
    rc.scheme = scheme_from(a.scheme);
    rc.family = a.family == "signed" ? FamilyKind::signed_t : FamilyKind::folded_t;
    rc.allow_raw = a.preprocess == "off";
    rc.base = a.log_base == "e" ? LogBase::nats : LogBase::bits;
    rc.x_tol = a.tol;
    rc.theta_max = a.theta_max;
    rc.laplace_smoothing = a.smoothing == "laplace";

    const AnalysisReport rep = run(ds, rc);
    for (const std::string& f : a.formats)
        for (const std::string& p : emit(rep, format_from(f), a.out_dir)) std::cout << p << "\n";
    for (const auto& [name, ms] : rep.timings_ms)
        std::cerr << "timing " << name << ": " << ms << " ms\n";
    return 0;
}

void write_text(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

int run_synth(const SynthArgs& s) {
    const SyntheticTruth st =
        generate_synthetic(s.n_features, s.m, s.n, s.pi0, s.theta_alt, s.seed);
    std::string csv = "feature_id,group,value\n";
    for (const FeatureSample& f : st.dataset.features) {
        for (const double v : f.group_x)
            csv += f.feature_id + "," + st.dataset.name_x + "," + format_double(v) + "\n";
        for (const double v : f.group_y)
            csv += f.feature_id + "," + st.dataset.name_y + "," + format_double(v) + "\n";
    }
    write_text(s.out, csv);
    std::cout << s.out << "\n";
    if (!s.truth_out.empty()) {
        std::string truth = "feature_id,is_null\n";
        for (std::size_t i = 0; i < st.dataset.features.size(); ++i)
            truth += st.dataset.features[i].feature_id + "," + (st.is_null[i] ? "1" : "0") + "\n";
        write_text(s.truth_out, truth);
        std::cout << s.truth_out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimum description length simultaneous inference over feature contrasts"};
    app.require_subcommand(1);

    AnalyzeArgs a;
    CLI::App* an = app.add_subcommand("analyze", "run the coding schemes and write reports");
    an->add_option("--input", a.input, "long-format CSV path, or 'synthetic' for generated data")
        ->required();
    an->add_option("--group-x", a.group_x, "first group label (cases)");
    an->add_option("--group-y", a.group_y, "second group label (controls)");
    an->add_option("--scheme", a.scheme, "coding scheme(s) to run")
        ->check(CLI::IsMember({"exact", "approx", "mixture", "all"}));
    an->add_option("--family", a.family, "statistic family: folded |t| or signed t")
        ->check(CLI::IsMember({"folded", "signed"}));
    an->add_option("--preprocess", a.preprocess, "shift-and-log transform of raw values")
        ->check(CLI::IsMember({"on", "off"}));
    an->add_option("--log-base", a.log_base, "reporting base: 2 (bits) or e (nats)")
        ->check(CLI::IsMember({"2", "e"}));
    an->add_option("--tol", a.tol, "optimizer bracket tolerance");
    an->add_option("--theta-max", a.theta_max, "parameter search bound (0 = derive from data)");
    an->add_option("--smoothing", a.smoothing, "null-proportion smoothing")
        ->check(CLI::IsMember({"off", "laplace"}));
    an->add_option("--seed", a.seed, "seed when --input synthetic");
    an->add_option("--out-dir", a.out_dir, "directory for emitted files");
    an->add_option("--format", a.formats, "output format(s): csv, jsonl, plotdata")
        ->check(CLI::IsMember({"csv", "jsonl", "plotdata"}));
    an->add_option("--synth-features", a.synth_features, "synthetic input: feature count");
    an->add_option("--synth-m", a.synth_m, "synthetic input: first group size");
    an->add_option("--synth-n", a.synth_n, "synthetic input: second group size");
    an->add_option("--synth-pi0", a.synth_pi0, "synthetic input: null proportion");
    an->add_option("--synth-theta-alt", a.synth_theta_alt, "synthetic input: alternative effect");
    an->set_config("--config", "", "key=value config file; command-line flags win");

    SynthArgs s;
    CLI::App* sy = app.add_subcommand("synth", "write a synthetic two-group dataset");
    sy->add_option("--n-features", s.n_features, "feature count");
    sy->add_option("--m", s.m, "first group size");
    sy->add_option("--n", s.n, "second group size");
    sy->add_option("--pi0", s.pi0, "null proportion");
    sy->add_option("--theta-alt", s.theta_alt, "alternative effect size");
    sy->add_option("--seed", s.seed, "generator seed");
    sy->add_option("--out", s.out, "output CSV path");
    sy->add_option("--truth-out", s.truth_out, "optional true-label CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (sy->parsed()) return run_synth(s);
        return run_analyze(a);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
