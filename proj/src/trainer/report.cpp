#include "mtparse/trainer/report.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "mtparse/error.hpp"

namespace mtparse::trainer {

using nlohmann::json;

MeanStd aggregate(std::span<const double> values) {
    MeanStd m;
    m.n = static_cast<int>(values.size());
    if (values.empty()) return m;
    m.mean = std::accumulate(values.begin(), values.end(), 0.0) / m.n;
    if (m.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - m.mean) * (v - m.mean);
        m.std = std::sqrt(ss / (m.n - 1));
    }
    return m;
}

namespace {

std::string fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    std::string s = buf;
    if (s.rfind("-", 0) == 0 && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);  // no "-0.00"
    return s;
}

std::string row(const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + c + " |";
    return out + "\n";
}

std::string header(const std::vector<std::string>& metrics) {
    std::vector<std::string> cells{"model"};
    for (const auto& m : metrics) cells.push_back(metric_title(m));
    std::string out = row(cells);
    out += "|";
    for (std::size_t i = 0; i < cells.size(); ++i) out += " --- |";
    return out + "\n";
}

const std::vector<double>& values_of(const RunSummary& r, const std::string& metric) {
    auto it = r.metrics.find(metric);
    if (it == r.metrics.end() || it->second.empty()) {
        throw DataError("run '" + r.name + "' has no values for metric " + metric);
    }
    return it->second;
}

}  // namespace

std::string format_mean_std(const MeanStd& m, int precision) {
    return fixed(100.0 * m.mean, precision) + "(±" + fixed(100.0 * m.std, precision) + ")";
}

std::string format_delta(double score, double baseline, int precision) {
    const std::string delta = fixed(100.0 * (score - baseline), precision);
    return fixed(100.0 * score, precision) + "(" + (delta[0] == '-' ? "" : "+") + delta + ")";
}

std::string metric_title(const std::string& key) {
    static const std::map<std::string, std::string> titles{
        {"uas", "UAS"},
        {"las", "LAS"},
        {"root", "ROOT"},
        {"micro_f1", "micro F1"},
        {"micro_precision", "micro P"},
        {"micro_recall", "micro R"},
        {"macro_f1", "macro F1"},
        {"macro_precision", "macro P"},
        {"macro_recall", "macro R"},
        {"identification_f1", "identification F1"},
        {"accuracy", "acc."},
    };
    auto it = titles.find(key);
    return it == titles.end() ? key : it->second;
}

json to_json(const RunSummary& r) {
    json agg = json::object();
    for (const auto& [k, v] : r.metrics) {
        const MeanStd m = aggregate(v);
        agg[k] = {{"mean", m.mean}, {"std", m.std}, {"n", m.n}};
    }
    return {{"name", r.name}, {"setting", r.setting}, {"metrics", r.metrics}, {"aggregate", agg}};
}

RunSummary run_summary_from_json(const json& j) {
    RunSummary r;
    try {
        r.name = j.at("name").get<std::string>();
        r.setting = j.at("setting").get<std::map<std::string, std::string>>();
        r.metrics = j.at("metrics").get<std::map<std::string, std::vector<double>>>();
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed run summary: ") + e.what());
    }
    return r;
}

std::string multi_seed_table(std::span<const RunSummary> runs, const std::vector<std::string>& metrics) {
    std::string out = header(metrics);
    for (const auto& r : runs) {
        std::vector<std::string> cells{r.name};
        for (const auto& m : metrics) cells.push_back(format_mean_std(aggregate(values_of(r, m))));
        out += row(cells);
    }
    return out;
}

std::string ablation_table(std::span<const RunSummary> runs, const std::vector<std::string>& metrics) {
    if (runs.size() < 2) throw ConfigError("an ablation report needs at least two runs");
    const RunSummary& base = runs[0];
    for (std::size_t k = 1; k < runs.size(); ++k) {
        std::set<std::string> keys;
        for (const auto& [key, _] : base.setting) keys.insert(key);
        for (const auto& [key, _] : runs[k].setting) keys.insert(key);
        std::string bad;
        for (const auto& key : keys) {
            auto a = base.setting.find(key), b = runs[k].setting.find(key);
            const std::string va = a == base.setting.end() ? "<unset>" : a->second;
            const std::string vb = b == runs[k].setting.end() ? "<unset>" : b->second;
            if (va != vb) bad += (bad.empty() ? "" : ", ") + key + " (" + va + " vs " + vb + ")";
        }
        if (!bad.empty()) {
            throw ConfigError("runs '" + base.name + "' and '" + runs[k].name + "' are not comparable: " + bad);
        }
    }
    std::string out = header(metrics);
    std::vector<std::string> cells{base.name};
    for (const auto& m : metrics) cells.push_back(fixed(100.0 * aggregate(values_of(base, m)).mean, 2));
    out += row(cells);
    for (std::size_t k = 1; k < runs.size(); ++k) {
        cells = {runs[k].name};
        for (const auto& m : metrics) {
            cells.push_back(format_delta(aggregate(values_of(runs[k], m)).mean, aggregate(values_of(base, m)).mean));
        }
        out += row(cells);
    }
    return out;
}

}  // namespace mtparse::trainer
