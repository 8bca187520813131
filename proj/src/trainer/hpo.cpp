#include "mtparse/trainer/hpo.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "mtparse/error.hpp"

namespace mtparse::trainer {

using nlohmann::json;

std::map<std::string, double> sample_point(const SearchSpace& space, Rng& rng) {
    std::map<std::string, double> out;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& d : space.dims) {
        const double u = unit(rng);
        if (d.low == d.high) {
            out[d.name] = d.low;
        } else if (d.log_scale) {
            out[d.name] = std::exp(std::log(d.low) + u * (std::log(d.high) - std::log(d.low)));
        } else {
            out[d.name] = d.low + u * (d.high - d.low);
        }
    }
    return out;
}

SearchSpace relevant_dims(const SearchSpace& space, Task task) {
    SearchSpace out;
    for (const auto& d : space.dims) {
        const bool srl_only = d.name == "beta_srl" || d.name == "dropout_lstm";
        const bool dp_only = d.name == "lambda_dp" || d.name == "dropout_dp";
        if (task == Task::kDp && srl_only) continue;
        if (task == Task::kSrl && (dp_only || d.name == "beta_srl")) continue;
        out.dims.push_back(d);
    }
    return out;
}

int trial_epochs(const HpoConfig& hpo, Task task) {
    if (hpo.epochs > 0) return hpo.epochs;
    return task == Task::kDp ? 3 : 10;
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

HpoResult hpo_search(const RunConfig& base, Task task, const tokenize::SubwordModel& tokenizer, const TrainData& data,
                     const HpoOptions& options) {
    base.validate();
    const int epochs = trial_epochs(base.hpo, task);
    const SearchSpace space = relevant_dims(base.hpo.space, task);
    Rng search = numerics::derive_rng(base.train.seed, kSearch);
    HpoResult result;
    std::vector<const TrialRecord*> completed;
    result.trials.reserve(base.hpo.n_trials);

    for (int t = 0; t < base.hpo.n_trials; ++t) {
        TrialRecord rec;
        rec.id = t;
        rec.sampled = sample_point(space, search);
        RunConfig cfg = base;
        for (const auto& [name, value] : rec.sampled) apply_hyperparameter(cfg, name, value);
        cfg.train.epochs = epochs;
        cfg.train.stop_at.reset();
        cfg.train.patience = 0;
        cfg.validate();

        Model model(cfg.model, tokenizer, cfg.train.seed);
        TrainOptions opt;
        opt.max_tokens = base.hpo.max_tokens;
        opt.restore_best = false;
        opt.on_epoch = [&](const EpochRecord& e) {
            if (rec.pruned) {
                rec.forced_metrics.push_back(e.target);
                return true;
            }
            rec.metrics.push_back(e.target);
            if (!base.hpo.prune || static_cast<int>(completed.size()) < std::max(base.hpo.startup_trials, 1)) return true;
            std::vector<double> peers;
            for (const TrialRecord* c : completed) peers.push_back(c->metrics.at(e.epoch - 1));
            if (e.target < median(peers)) {
                rec.pruned = true;
                rec.pruned_at = e.epoch;
                return options.force_complete;
            }
            return true;
        };
        train(model, cfg.train, task, data, opt);

        rec.best_metric = *std::max_element(rec.metrics.begin(), rec.metrics.end());
        if (rec.pruned && options.force_complete) {
            double best = rec.best_metric;
            for (double m : rec.forced_metrics) best = std::max(best, m);
            rec.forced_best = best;
        }
        result.trials.push_back(rec);
        if (!rec.pruned) completed.push_back(&result.trials.back());
        if (options.log) *options.log << to_json(rec).dump() << '\n';
    }

    double best = -1.0;
    for (const auto& r : result.trials) {
        if (!r.pruned && r.best_metric > best) {
            best = r.best_metric;
            result.best_trial = r.id;
        }
    }
    result.best_config = base;
    for (const auto& [name, value] : result.trials[result.best_trial].sampled) {
        apply_hyperparameter(result.best_config, name, value);
    }
    return result;
}

json to_json(const TrialRecord& t) {
    json j{{"trial", t.id}, {"config", t.sampled}, {"metrics", t.metrics}, {"pruned", t.pruned},
           {"best_metric", t.best_metric}};
    j["pruned_at"] = t.pruned_at ? json(*t.pruned_at) : json(nullptr);
    if (t.forced_best) {
        j["forced_metrics"] = t.forced_metrics;
        j["forced_best"] = *t.forced_best;
    }
    return j;
}

}  // namespace mtparse::trainer
