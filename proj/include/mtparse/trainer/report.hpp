#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mtparse::trainer {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation; 0 for a single value
    int n = 0;
};

MeanStd aggregate(std::span<const double> values);

/// "94.84(±0.28)": values in [0, 1] shown as percentages.
std::string format_mean_std(const MeanStd& m, int precision = 2);
/// "51.50(-8.62)": score and signed delta, both as percentages.
std::string format_delta(double score, double baseline, int precision = 2);

/// One configuration evaluated over one or more seeds.
struct RunSummary {
    std::string name;
    /// Fields that must agree for runs to be compared (task, setting, data hash).
    std::map<std::string, std::string> setting;
    /// Metric name -> value per seed.
    std::map<std::string, std::vector<double>> metrics;
};

nlohmann::json to_json(const RunSummary& r);
RunSummary run_summary_from_json(const nlohmann::json& j);

/// Display name of a metric key (uas -> UAS, micro_f1 -> micro F1, ...).
std::string metric_title(const std::string& key);

/// Pipe table with one row per run and "mean(±std)" cells.
std::string multi_seed_table(std::span<const RunSummary> runs, const std::vector<std::string>& metrics);

/// Pipe table; the first run is the baseline and shows plain scores, every
/// other row shows "score(delta)" against it. Throws ConfigError listing the
/// setting fields that differ from the baseline.
std::string ablation_table(std::span<const RunSummary> runs, const std::vector<std::string>& metrics);

}  // namespace mtparse::trainer
