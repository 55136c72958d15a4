#include "mdlinfer/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mdlinfer/csv.hpp"
#include "mdlinfer/errors.hpp"
#include "mdlinfer/numeric.hpp"

namespace mdlinfer {

namespace {

// Joins collected problem descriptions, capping the listing so a thoroughly
// broken file does not produce a megabyte of message.
std::string join_problems(const std::string& intro, const std::vector<std::string>& problems) {
    constexpr size_t cap = 20;
    std::string msg = intro;
    for (size_t i = 0; i < problems.size() && i < cap; ++i) msg += "\n  " + problems[i];
    if (problems.size() > cap)
        msg += "\n  ... and " + std::to_string(problems.size() - cap) + " more";
    return msg;
}

double quantile_type7(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const size_t lo = static_cast<size_t>(h);
    const size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

Dataset ingest_csv(const std::string& path, const IngestConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return ingest_csv_text(buf.str(), config, path);
}

Dataset ingest_csv_text(const std::string& text, const IngestConfig& config,
                        const std::string& origin) {
    if (config.group_x.empty() || config.group_y.empty())
        throw InputError("both group labels must be configured");
    if (config.group_x == config.group_y)
        throw InputError("the two group labels must differ, got '" + config.group_x + "' twice");

    std::vector<std::string> lines;
    {
        std::string cur;
        for (const char c : text) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) lines.push_back(cur);
    }
    if (lines.empty()) throw ParseError(origin + ": empty file, header row required");

    const std::vector<std::string> header = split_csv_line(lines[0]);
    auto column = [&](const std::string& name) -> size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw ParseError(origin + ": header lacks required column '" + name + "'");
        return static_cast<size_t>(it - header.begin());
    };
    const size_t fi = column(config.feature_col);
    const size_t gi = column(config.group_col);
    const size_t vi = column(config.value_col);

    Dataset ds;
    ds.name_x = config.group_x;
    ds.name_y = config.group_y;
    std::unordered_map<std::string, size_t> index;
    std::vector<std::string> problems;

    for (size_t li = 1; li < lines.size(); ++li) {
        const size_t lineno = li + 1;
        if (lines[li].empty() || lines[li] == "\r") continue;
        const std::vector<std::string> cells = split_csv_line(lines[li]);
        if (cells.size() != header.size()) {
            problems.push_back("line " + std::to_string(lineno) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(cells.size()));
            continue;
        }
        const std::string& id = cells[fi];
        const std::string& group = cells[gi];
        if (id.empty()) {
            problems.push_back("line " + std::to_string(lineno) + ": empty '" +
                               config.feature_col + "' field");
            continue;
        }
        bool ok = false;
        const double value = parse_double(cells[vi], ok);
        if (!ok || !std::isfinite(value)) {
            problems.push_back("line " + std::to_string(lineno) + ", column '" +
                               config.value_col + "': not a finite number: '" + cells[vi] + "'");
            continue;
        }
        if (group != config.group_x && group != config.group_y) continue;

        auto [it, inserted] = index.try_emplace(id, ds.features.size());
        if (inserted) {
            FeatureSample f;
            f.feature_id = id;
            ds.features.push_back(std::move(f));
        }
        FeatureSample& f = ds.features[it->second];
        (group == config.group_x ? f.group_x : f.group_y).push_back(value);
    }

    if (!problems.empty()) throw ParseError(join_problems(origin + ": malformed rows:", problems));
    if (ds.features.empty())
        throw InputError(origin + ": no data rows matched groups '" + config.group_x + "'/'" +
                         config.group_y + "'");

    std::vector<std::string> small;
    for (const auto& f : ds.features) {
        if (f.group_x.size() < 2)
            small.push_back("feature '" + f.feature_id + "': group '" + config.group_x +
                            "' has " + std::to_string(f.group_x.size()) + " value(s), need 2");
        if (f.group_y.size() < 2)
            small.push_back("feature '" + f.feature_id + "': group '" + config.group_y +
                            "' has " + std::to_string(f.group_y.size()) + " value(s), need 2");
    }
    if (!small.empty()) throw GroupTooSmall(join_problems(origin + ":", small));
    return ds;
}

void validate_dataset(const Dataset& ds) {
    std::unordered_set<std::string> seen;
    for (const auto& f : ds.features) {
        if (!seen.insert(f.feature_id).second)
            throw DuplicateFeatureId("duplicate feature id '" + f.feature_id + "'");
        if (f.group_x.size() < 2 || f.group_y.size() < 2)
            throw GroupTooSmall("feature '" + f.feature_id + "' needs two values per group");
        for (const double v : f.group_x)
            if (!std::isfinite(v))
                throw InputError("feature '" + f.feature_id + "' has a non-finite value");
        for (const double v : f.group_y)
            if (!std::isfinite(v))
                throw InputError("feature '" + f.feature_id + "' has a non-finite value");
    }
}

Dataset preprocess(const Dataset& raw) {
    if (raw.preprocessing.applied)
        throw AlreadyPreprocessed("values already transformed as " + raw.preprocessing.transform);

    std::vector<double> pooled;
    for (const auto& f : raw.features) pooled.insert(pooled.end(), f.group_y.begin(), f.group_y.end());
    if (pooled.empty()) throw InputError("no '" + raw.name_y + "' group values to pool");
    const double q1 = quantile_type7(std::move(pooled), 0.25);

    std::vector<std::string> offenders;
    auto check = [&](const FeatureSample& f, const std::string& group, const std::vector<double>& vals) {
        for (const double v : vals)
            if (!(v + q1 > 0.0))
                offenders.push_back("feature '" + f.feature_id + "' group '" + group + "' value " +
                                    format_double(v) + " (shift " + format_double(q1) + ")");
    };
    for (const auto& f : raw.features) {
        check(f, raw.name_x, f.group_x);
        check(f, raw.name_y, f.group_y);
    }
    if (!offenders.empty())
        throw NonPositiveAfterShift(
            join_problems("values not positive after adding the quartile shift:", offenders));

    Dataset out = raw;
    for (auto& f : out.features) {
        for (double& v : f.group_x) v = std::log(v + q1);
        for (double& v : f.group_y) v = std::log(v + q1);
    }
    out.preprocessing.applied = true;
    out.preprocessing.shift = q1;
    out.preprocessing.transform = "ln(value + " + format_double(q1) + ")";
    return out;
}

SyntheticTruth generate_synthetic(size_t n_features, size_t m, size_t n, double pi0,
                                  double theta_alt, uint64_t seed) {
    if (n_features == 0) throw std::invalid_argument("n_features must be positive");
    if (m < 2 || n < 2) throw std::invalid_argument("each group needs at least two draws");
    if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw std::invalid_argument("pi0 must lie in [0, 1]");
    if (!(theta_alt >= 0.0) || !std::isfinite(theta_alt))
        throw std::invalid_argument("theta_alt must be finite and nonnegative");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SyntheticTruth out;
    out.dataset.name_x = "case";
    out.dataset.name_y = "control";
    out.dataset.features.reserve(n_features);
    out.is_null.reserve(n_features);
    for (size_t i = 0; i < n_features; ++i) {
        const bool is_null = unif(rng) < pi0;
        double shift = 0.0;
        if (!is_null) shift = (unif(rng) < 0.5 ? 1.0 : -1.0) * theta_alt;

        FeatureSample f;
        f.feature_id = "f" + std::to_string(i + 1);
        f.group_x.reserve(m);
        f.group_y.reserve(n);
        for (size_t k = 0; k < m; ++k) f.group_x.push_back(shift + gauss(rng));
        for (size_t k = 0; k < n; ++k) f.group_y.push_back(gauss(rng));
        out.dataset.features.push_back(std::move(f));
        out.is_null.push_back(is_null);
    }
    // synthetic draws are already on the analysis scale
    out.dataset.preprocessing.applied = true;
    out.dataset.preprocessing.shift = 0.0;
    out.dataset.preprocessing.transform = "identity (synthetic)";
    return out;
}

}  // namespace mdlinfer
