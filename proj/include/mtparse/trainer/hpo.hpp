#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtparse/tokenize/subword.hpp"
#include "mtparse/trainer/config.hpp"
#include "mtparse/trainer/train.hpp"

namespace mtparse::trainer {

struct TrialRecord {
    int id = 0;
    std::map<std::string, double> sampled;
    std::vector<double> metrics;  // validation target per epoch while the trial was live
    bool pruned = false;
    std::optional<int> pruned_at;  // epoch at which the trial fell below the median
    double best_metric = 0.0;
    /// Force-complete mode: metrics of the epochs run after pruning.
    std::vector<double> forced_metrics;
    std::optional<double> forced_best;  // best over all epochs including forced ones
};

struct HpoResult {
    std::vector<TrialRecord> trials;
    int best_trial = 0;
    RunConfig best_config;
};

struct HpoOptions {
    /// Keep training pruned trials to the end without letting them count as
    /// completed or become best. Used to audit the pruning rule.
    bool force_complete = false;
    /// One JSON line per finished trial.
    std::ostream* log = nullptr;
};

/// Draws one configuration: each dimension uniform in its linear or log domain.
std::map<std::string, double> sample_point(const SearchSpace& space, Rng& rng);

/// Dimensions that affect `task`: DP drops beta_srl and dropout_lstm, SRL
/// drops beta_srl, lambda_dp and dropout_dp.
SearchSpace relevant_dims(const SearchSpace& space, Task task);

/// Epoch budget per trial: hpo.epochs, or 3 for DP and 10 for SRL-bearing tasks.
int trial_epochs(const HpoConfig& hpo, Task task);

/// Seeded random search. Trial t samples from the search stream, builds a
/// fresh model from `base` and the run seed, and trains with the reduced
/// epoch budget and hpo.max_tokens. After each epoch a trial whose target is
/// below the median of completed trials at that epoch is pruned (once at
/// least hpo.startup_trials have completed). The best completed trial by
/// its best epoch wins; ties go to the earlier trial.
HpoResult hpo_search(const RunConfig& base, Task task, const tokenize::SubwordModel& tokenizer, const TrainData& data,
                     const HpoOptions& options = {});

nlohmann::json to_json(const TrialRecord& t);

}  // namespace mtparse::trainer
