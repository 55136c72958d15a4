#include "mdlinfer/report.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "mdlinfer/csv.hpp"
#include "mdlinfer/errors.hpp"

namespace mdlinfer {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::exact: return "exact";
        case Scheme::approx: return "approx";
        case Scheme::mixture: return "mixture";
        default: return "all";
    }
}

std::string single_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ';';
    return s;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

// Canonical row column order; the loader accepts any order but emission is
// fixed so repeated runs byte-match.
const std::vector<std::string>& row_columns() {
    static const std::vector<std::string> cols = {
        "feature_id",        "error",
        "statistic",         "df",
        "scale",             "theta_mle",
        "null_len",          "regret_null",
        "theta_exact",       "alt_len_exact",
        "regret_exact",      "delta_exact",
        "p_null_exact",      "total_delta_exact",
        "posterior_null_exact", "selected_exact",
        "alt_len_approx",    "regret_approx",
        "delta_approx",      "total_delta_approx",
        "posterior_null_approx", "selected_approx",
        "lfdr",              "mixture_delta"};
    return cols;
}

std::string opt_num(const std::optional<double>& v) { return v ? format_double(*v) : ""; }
std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }
std::string opt_str(const std::optional<std::string>& v) { return v ? csv_field(*v) : ""; }
std::string flag_str(bool b) { return b ? "1" : "0"; }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

ordered_json json_num(const std::optional<double>& v) {
    if (!v) return nullptr;
    if (std::isfinite(*v)) return *v;
    return format_double(*v);  // JSON has no infinities; keep the sign as text
}

std::string selected_name(Selected s) {
    return s == Selected::null_model ? "null" : "alternative";
}

}  // namespace

AnalysisReport run(const Dataset& ds, const RunConfig& config) {
    if (!ds.preprocessing.applied && !config.allow_raw)
        throw InputError("dataset is raw; run preprocessing first or allow raw values");
    validate_dataset(ds);
    if (ds.features.size() < 2) throw InputError("need at least two features to code against");

    const StatFamily family = config.family == FamilyKind::folded_t ? StatFamily::folded()
                                                                    : StatFamily::signed_family();
    // Codes are computed in bits and converted at the reporting boundary.
    auto conv = [&](double bits) { return config.base == LogBase::bits ? bits : bits * kLn2; };

    AnalysisReport rep;
    rep.globals.scheme = scheme_name(config.scheme);
    rep.globals.family = config.family == FamilyKind::folded_t ? "folded_t" : "signed_t";
    rep.globals.base = config.base == LogBase::bits ? "bits" : "nats";
    rep.globals.group_x = ds.name_x;
    rep.globals.group_y = ds.name_y;
    rep.globals.preprocessed = ds.preprocessing.applied;
    if (ds.preprocessing.applied) {
        rep.globals.shift = ds.preprocessing.shift;
        rep.globals.transform = ds.preprocessing.transform;
    }

    rep.rows.resize(ds.features.size());
    std::vector<ReducedStatistic> stats;
    std::vector<double> mles;
    std::vector<size_t> row_of;
    MleOptions mle_opts;
    mle_opts.theta_max = config.theta_max;
    mle_opts.optim.x_tol = config.x_tol;

    auto t0 = std::chrono::steady_clock::now();
    for (size_t i = 0; i < ds.features.size(); ++i) {
        ReportRow& row = rep.rows[i];
        row.feature_id = ds.features[i].feature_id;
        try {
            const ReducedStatistic s = family.kind == FamilyKind::folded_t
                                           ? abs_two_sample_t(ds.features[i])
                                           : two_sample_t(ds.features[i]);
            const double mle = feature_mle(family, s, mle_opts);
            row.statistic = s.value;
            row.df = s.df;
            row.scale = s.scale;
            row.theta_mle = mle;
            stats.push_back(s);
            mles.push_back(mle);
            row_of.push_back(i);
        } catch (const InputError& e) {
            row.error = single_line(e.what());
        } catch (const NumericError& e) {
            row.error = single_line(e.what());
        }
    }
    rep.timings_ms["statistics"] = elapsed_ms(t0);
    if (stats.size() < 2)
        throw InputError("fewer than two analyzable features (" + std::to_string(stats.size()) +
                         " of " + std::to_string(ds.features.size()) + ")");

    CodingInput cin;
    cin.family = family;
    cin.stats = stats;
    cin.mles = mles;
    CodingOptions copts;
    copts.theta_max = config.theta_max;
    copts.x_tol = config.x_tol;
    copts.base = LogBase::bits;
    const SelectionOptions sopts{config.laplace_smoothing};

    const bool want_exact = config.scheme == Scheme::exact || config.scheme == Scheme::all;
    const bool want_approx = config.scheme == Scheme::approx || config.scheme == Scheme::all;
    const bool want_mix = config.scheme == Scheme::mixture || config.scheme == Scheme::all;

    if (want_approx) {
        t0 = std::chrono::steady_clock::now();
        const ApproxCode ac = approx_code(cin, copts);
        const std::vector<SelectionResult> sel = run_selection(ac.codes, CodingScheme::approx, sopts);
        rep.globals.theta_approx = ac.theta;
        rep.globals.p_null_approx = sel.front().p_null;
        rep.globals.approx_degenerate = ac.degenerate_alternative;
        rep.globals.approx_nonunique = ac.nonunique;
        for (size_t k = 0; k < stats.size(); ++k) {
            ReportRow& row = rep.rows[row_of[k]];
            row.null_len = conv(ac.codes[k].null_len);
            row.regret_null = conv(ac.codes[k].regret_null);
            row.alt_len_approx = conv(ac.codes[k].alt_len);
            row.regret_approx = conv(ac.codes[k].regret_alt);
            row.delta_approx = conv(ac.codes[k].delta);
            row.total_delta_approx = conv(sel[k].total_delta);
            row.posterior_null_approx = sel[k].posterior_null;
            row.selected_approx = selected_name(sel[k].selected);
        }
        rep.timings_ms["approx"] = elapsed_ms(t0);
    }

    if (want_exact) {
        t0 = std::chrono::steady_clock::now();
        const ExactCode ec = exact_code(cin, copts);
        const std::vector<SelectionResult> sel = run_selection(ec.codes, CodingScheme::exact, sopts);
        rep.globals.exact_degenerate = ec.degenerate_alternative;
        rep.globals.exact_nonunique = ec.nonunique;
        for (size_t k = 0; k < stats.size(); ++k) {
            ReportRow& row = rep.rows[row_of[k]];
            row.null_len = conv(ec.codes[k].null_len);
            row.regret_null = conv(ec.codes[k].regret_null);
            row.theta_exact = ec.thetas[k];
            row.alt_len_exact = conv(ec.codes[k].alt_len);
            row.regret_exact = conv(ec.codes[k].regret_alt);
            row.delta_exact = conv(ec.codes[k].delta);
            row.p_null_exact = sel[k].p_null;
            row.total_delta_exact = conv(sel[k].total_delta);
            row.posterior_null_exact = sel[k].posterior_null;
            row.selected_exact = selected_name(sel[k].selected);
        }
        rep.timings_ms["exact"] = elapsed_ms(t0);
    }

    if (want_mix) {
        t0 = std::chrono::steady_clock::now();
        MixtureOptions mopts;
        mopts.theta_max = config.theta_max;
        mopts.x_tol = config.x_tol;
        const MixtureFit fit = fit_mixture(family, stats, std::nullopt, mopts);
        rep.globals.theta_mix = fit.theta_alt;
        rep.globals.pi0_mix = fit.pi0;
        rep.globals.mix_loglik = from_nats(fit.loglik, config.base);
        rep.globals.mix_non_identifiable = fit.non_identifiable;
        for (size_t k = 0; k < stats.size(); ++k) {
            const LfdrResult lr = lfdr(family, fit, stats[k]);
            ReportRow& row = rep.rows[row_of[k]];
            row.lfdr = lr.lfdr;
            row.mixture_delta = conv(lr.mixture_delta);
        }
        rep.timings_ms["mixture"] = elapsed_ms(t0);
    }

    return rep;
}

std::string report_csv_text(const AnalysisReport& rep) {
    std::string out;
    auto g = [&](const char* key, const std::string& value) {
        out += "# ";
        out += key;
        out += "=";
        out += value;
        out += "\n";
    };
    const ReportGlobals& gl = rep.globals;
    g("spec_version", gl.spec_version);
    g("scheme", gl.scheme);
    g("family", gl.family);
    g("base", gl.base);
    g("group_x", gl.group_x);
    g("group_y", gl.group_y);
    g("preprocessed", flag_str(gl.preprocessed));
    if (gl.shift) g("shift", format_double(*gl.shift));
    if (gl.transform) g("transform", *gl.transform);
    if (gl.theta_approx) g("theta_approx", format_double(*gl.theta_approx));
    if (gl.p_null_approx) g("p_null_approx", format_double(*gl.p_null_approx));
    if (gl.approx_degenerate) g("approx_degenerate", flag_str(*gl.approx_degenerate));
    if (gl.approx_nonunique) g("approx_nonunique", flag_str(*gl.approx_nonunique));
    if (gl.exact_degenerate) g("exact_degenerate", flag_str(*gl.exact_degenerate));
    if (gl.exact_nonunique) g("exact_nonunique", flag_str(*gl.exact_nonunique));
    if (gl.theta_mix) g("theta_mix", format_double(*gl.theta_mix));
    if (gl.pi0_mix) g("pi0_mix", format_double(*gl.pi0_mix));
    if (gl.mix_loglik) g("mix_loglik", format_double(*gl.mix_loglik));
    if (gl.mix_non_identifiable) g("mix_non_identifiable", flag_str(*gl.mix_non_identifiable));

    for (size_t c = 0; c < row_columns().size(); ++c) {
        if (c) out += ",";
        out += row_columns()[c];
    }
    out += "\n";

    for (const ReportRow& r : rep.rows) {
        std::vector<std::string> cells = {
            csv_field(r.feature_id),       csv_field(r.error),
            opt_num(r.statistic),          opt_int(r.df),
            opt_num(r.scale),              opt_num(r.theta_mle),
            opt_num(r.null_len),           opt_num(r.regret_null),
            opt_num(r.theta_exact),        opt_num(r.alt_len_exact),
            opt_num(r.regret_exact),       opt_num(r.delta_exact),
            opt_num(r.p_null_exact),       opt_num(r.total_delta_exact),
            opt_num(r.posterior_null_exact), opt_str(r.selected_exact),
            opt_num(r.alt_len_approx),     opt_num(r.regret_approx),
            opt_num(r.delta_approx),       opt_num(r.total_delta_approx),
            opt_num(r.posterior_null_approx), opt_str(r.selected_approx),
            opt_num(r.lfdr),               opt_num(r.mixture_delta)};
        for (size_t c = 0; c < cells.size(); ++c) {
            if (c) out += ",";
            out += cells[c];
        }
        out += "\n";
    }
    return out;
}

namespace {

std::string jsonl_text(const AnalysisReport& rep) {
    std::string out;
    for (const ReportRow& r : rep.rows) {
        ordered_json j;
        j["feature_id"] = r.feature_id;
        j["error"] = r.error;
        j["statistic"] = json_num(r.statistic);
        j["df"] = r.df ? ordered_json(*r.df) : ordered_json(nullptr);
        j["scale"] = json_num(r.scale);
        j["theta_mle"] = json_num(r.theta_mle);
        j["null_len"] = json_num(r.null_len);
        j["regret_null"] = json_num(r.regret_null);
        j["theta_exact"] = json_num(r.theta_exact);
        j["alt_len_exact"] = json_num(r.alt_len_exact);
        j["regret_exact"] = json_num(r.regret_exact);
        j["delta_exact"] = json_num(r.delta_exact);
        j["p_null_exact"] = json_num(r.p_null_exact);
        j["total_delta_exact"] = json_num(r.total_delta_exact);
        j["posterior_null_exact"] = json_num(r.posterior_null_exact);
        j["selected_exact"] = r.selected_exact ? ordered_json(*r.selected_exact) : ordered_json(nullptr);
        j["alt_len_approx"] = json_num(r.alt_len_approx);
        j["regret_approx"] = json_num(r.regret_approx);
        j["delta_approx"] = json_num(r.delta_approx);
        j["total_delta_approx"] = json_num(r.total_delta_approx);
        j["posterior_null_approx"] = json_num(r.posterior_null_approx);
        j["selected_approx"] = r.selected_approx ? ordered_json(*r.selected_approx) : ordered_json(nullptr);
        j["lfdr"] = json_num(r.lfdr);
        j["mixture_delta"] = json_num(r.mixture_delta);
        out += j.dump();
        out += "\n";
    }
    return out;
}

std::string globals_json_text(const ReportGlobals& gl) {
    ordered_json j;
    j["spec_version"] = gl.spec_version;
    j["scheme"] = gl.scheme;
    j["family"] = gl.family;
    j["base"] = gl.base;
    j["group_x"] = gl.group_x;
    j["group_y"] = gl.group_y;
    j["preprocessed"] = gl.preprocessed;
    if (gl.shift) j["shift"] = *gl.shift;
    if (gl.transform) j["transform"] = *gl.transform;
    if (gl.theta_approx) j["theta_approx"] = json_num(gl.theta_approx);
    if (gl.p_null_approx) j["p_null_approx"] = json_num(gl.p_null_approx);
    if (gl.approx_degenerate) j["approx_degenerate"] = *gl.approx_degenerate;
    if (gl.approx_nonunique) j["approx_nonunique"] = *gl.approx_nonunique;
    if (gl.exact_degenerate) j["exact_degenerate"] = *gl.exact_degenerate;
    if (gl.exact_nonunique) j["exact_nonunique"] = *gl.exact_nonunique;
    if (gl.theta_mix) j["theta_mix"] = json_num(gl.theta_mix);
    if (gl.pi0_mix) j["pi0_mix"] = json_num(gl.pi0_mix);
    if (gl.mix_loglik) j["mix_loglik"] = json_num(gl.mix_loglik);
    if (gl.mix_non_identifiable) j["mix_non_identifiable"] = *gl.mix_non_identifiable;
    return j.dump(2) + "\n";
}

// Two-column plot file over the report rows that carry the field; x is the
// 1-based row position so points line up with the report ordering.
std::string plot_text(const AnalysisReport& rep, const char* yname,
                      std::optional<double> ReportRow::*field) {
    std::string out = std::string("feature_index,") + yname + "\n";
    for (size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& v = rep.rows[i].*field;
        if (!v) continue;
        out += std::to_string(i + 1);
        out += ",";
        out += format_double(*v);
        out += "\n";
    }
    return out;
}

std::string scatter_text(const AnalysisReport& rep) {
    std::string out = "delta_exact,delta_approx\n";
    for (const ReportRow& r : rep.rows) {
        if (!r.delta_exact || !r.delta_approx) continue;
        out += format_double(*r.delta_exact);
        out += ",";
        out += format_double(*r.delta_approx);
        out += "\n";
    }
    return out;
}

}  // namespace

std::vector<std::string> emit(const AnalysisReport& rep, EmitFormat format,
                              const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    auto path = [&](const char* name) { return (std::filesystem::path(out_dir) / name).string(); };

    std::vector<std::string> written;
    if (format == EmitFormat::csv) {
        const std::string p = path("report.csv");
        write_file(p, report_csv_text(rep));
        written.push_back(p);
    } else if (format == EmitFormat::jsonl) {
        const std::string p = path("report.jsonl");
        write_file(p, jsonl_text(rep));
        written.push_back(p);
        const std::string gp = path("report_globals.json");
        write_file(gp, globals_json_text(rep.globals));
        written.push_back(gp);
    } else {
        const bool has_approx = rep.globals.theta_approx.has_value();
        const bool has_exact = rep.globals.exact_degenerate.has_value();
        ordered_json manifest;
        manifest["files"] = ordered_json::object();
        manifest["omitted"] = ordered_json::object();

        auto emit_plot = [&](const char* name, const char* figure, const char* x, const char* y,
                             const std::string& content) {
            const std::string p = path(name);
            write_file(p, content);
            written.push_back(p);
            manifest["files"][name] = {{"figure", figure}, {"x", x}, {"y", y}};
        };

        if (has_approx) {
            emit_plot("plot_fig1_delta.csv", "1", "feature_index", "delta_approx",
                      plot_text(rep, "delta_approx", &ReportRow::delta_approx));
            emit_plot("plot_fig1_regret.csv", "1", "feature_index", "regret_approx",
                      plot_text(rep, "regret_approx", &ReportRow::regret_approx));
            emit_plot("plot_fig4_total_delta.csv", "4", "feature_index", "total_delta_approx",
                      plot_text(rep, "total_delta_approx", &ReportRow::total_delta_approx));
        } else {
            manifest["omitted"]["figure_1"] = "shared-parameter scheme was not run";
            manifest["omitted"]["figure_4"] = "shared-parameter scheme was not run";
        }
        manifest["omitted"]["figure_2"] =
            "one contrast per run; a second contrast needs a second input";
        if (has_approx && has_exact) {
            emit_plot("plot_fig3_scatter.csv", "3", "delta_exact", "delta_approx",
                      scatter_text(rep));
        } else {
            manifest["omitted"]["figure_3"] =
                "needs both the leave-one-out and shared-parameter schemes";
        }
        const std::string mp = path("plot_manifest.json");
        write_file(mp, manifest.dump(2) + "\n");
        written.push_back(mp);
    }
    return written;
}

namespace {

bool parse_flag(const std::string& v, const std::string& key) {
    if (v == "1") return true;
    if (v == "0") return false;
    throw ParseError("global '" + key + "' must be 0 or 1, got '" + v + "'");
}

double parse_num(const std::string& v, const std::string& where) {
    bool ok = false;
    const double x = parse_double(v, ok);
    if (!ok) throw ParseError(where + ": not a number: '" + v + "'");
    return x;
}

}  // namespace

AnalysisReport parse_report_csv(const std::string& text) {
    std::vector<std::string> lines;
    {
        std::string cur;
        for (const char c : text) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        if (!cur.empty()) lines.push_back(cur);
    }

    AnalysisReport rep;
    size_t li = 0;
    for (; li < lines.size() && lines[li].rfind("# ", 0) == 0; ++li) {
        const std::string kv = lines[li].substr(2);
        const size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw ParseError("malformed global line " + std::to_string(li + 1) + ": '" +
                             lines[li] + "'");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        ReportGlobals& gl = rep.globals;
        if (key == "spec_version") gl.spec_version = value;
        else if (key == "scheme") gl.scheme = value;
        else if (key == "family") gl.family = value;
        else if (key == "base") gl.base = value;
        else if (key == "group_x") gl.group_x = value;
        else if (key == "group_y") gl.group_y = value;
        else if (key == "preprocessed") gl.preprocessed = parse_flag(value, key);
        else if (key == "shift") gl.shift = parse_num(value, key);
        else if (key == "transform") gl.transform = value;
        else if (key == "theta_approx") gl.theta_approx = parse_num(value, key);
        else if (key == "p_null_approx") gl.p_null_approx = parse_num(value, key);
        else if (key == "approx_degenerate") gl.approx_degenerate = parse_flag(value, key);
        else if (key == "approx_nonunique") gl.approx_nonunique = parse_flag(value, key);
        else if (key == "exact_degenerate") gl.exact_degenerate = parse_flag(value, key);
        else if (key == "exact_nonunique") gl.exact_nonunique = parse_flag(value, key);
        else if (key == "theta_mix") gl.theta_mix = parse_num(value, key);
        else if (key == "pi0_mix") gl.pi0_mix = parse_num(value, key);
        else if (key == "mix_loglik") gl.mix_loglik = parse_num(value, key);
        else if (key == "mix_non_identifiable") gl.mix_non_identifiable = parse_flag(value, key);
        else throw ParseError("unknown global key '" + key + "'");
    }

    if (li >= lines.size()) throw ParseError("report has no column header row");
    const std::vector<std::string> header = split_csv_line(lines[li]);
    std::unordered_map<std::string, size_t> col;
    for (size_t c = 0; c < header.size(); ++c) col[header[c]] = c;
    for (const std::string& name : row_columns())
        if (!col.count(name)) throw ParseError("report header lacks column '" + name + "'");
    ++li;

    auto cell = [&](const std::vector<std::string>& cells, const char* name) -> const std::string& {
        return cells[col.at(name)];
    };
    auto onum = [&](const std::vector<std::string>& cells, const char* name,
                    size_t lineno) -> std::optional<double> {
        const std::string& v = cell(cells, name);
        if (v.empty()) return std::nullopt;
        return parse_num(v, "line " + std::to_string(lineno) + ", column '" + name + "'");
    };

    std::unordered_set<std::string> seen;
    for (; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const size_t lineno = li + 1;
        const std::vector<std::string> cells = split_csv_line(lines[li]);
        if (cells.size() != header.size())
            throw ParseError("line " + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(cells.size()));
        ReportRow r;
        r.feature_id = cell(cells, "feature_id");
        if (r.feature_id.empty())
            throw ParseError("line " + std::to_string(lineno) + ": empty feature_id");
        if (!seen.insert(r.feature_id).second)
            throw DuplicateFeatureId("report repeats feature id '" + r.feature_id + "'");
        r.error = cell(cells, "error");
        r.statistic = onum(cells, "statistic", lineno);
        {
            const std::string& v = cell(cells, "df");
            if (!v.empty()) {
                const double d = parse_num(v, "line " + std::to_string(lineno) + ", column 'df'");
                r.df = static_cast<int>(d);
            }
        }
        r.scale = onum(cells, "scale", lineno);
        r.theta_mle = onum(cells, "theta_mle", lineno);
        r.null_len = onum(cells, "null_len", lineno);
        r.regret_null = onum(cells, "regret_null", lineno);
        r.theta_exact = onum(cells, "theta_exact", lineno);
        r.alt_len_exact = onum(cells, "alt_len_exact", lineno);
        r.regret_exact = onum(cells, "regret_exact", lineno);
        r.delta_exact = onum(cells, "delta_exact", lineno);
        r.p_null_exact = onum(cells, "p_null_exact", lineno);
        r.total_delta_exact = onum(cells, "total_delta_exact", lineno);
        r.posterior_null_exact = onum(cells, "posterior_null_exact", lineno);
        if (const std::string& v = cell(cells, "selected_exact"); !v.empty()) r.selected_exact = v;
        r.alt_len_approx = onum(cells, "alt_len_approx", lineno);
        r.regret_approx = onum(cells, "regret_approx", lineno);
        r.delta_approx = onum(cells, "delta_approx", lineno);
        r.total_delta_approx = onum(cells, "total_delta_approx", lineno);
        r.posterior_null_approx = onum(cells, "posterior_null_approx", lineno);
        if (const std::string& v = cell(cells, "selected_approx"); !v.empty()) r.selected_approx = v;
        r.lfdr = onum(cells, "lfdr", lineno);
        r.mixture_delta = onum(cells, "mixture_delta", lineno);
        rep.rows.push_back(std::move(r));
    }
    return rep;
}

AnalysisReport load_report_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open report: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_report_csv(buf.str());
}

}  // namespace mdlinfer
