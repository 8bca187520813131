#include "mtparse/trainer/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mtparse/error.hpp"
#include "mtparse/numerics/ops.hpp"

namespace mtparse::trainer {

using nlohmann::json;
namespace ops = mtparse::numerics;

bool operator==(const EpochRecord& a, const EpochRecord& b) { return to_json(a) == to_json(b); }

std::string resolve_target(const TrainConfig& config, Task task) {
    if (!config.target_metric.empty()) return config.target_metric;
    return task == Task::kDp ? "uas" : "micro_f1";
}

namespace {

// Visits a shuffled index order in fixed-size batches and reshuffles
// whenever the order is exhausted.
class BatchCycler {
  public:
    BatchCycler(std::size_t n, std::size_t batch, Rng rng) : order_(n), batch_(batch), rng_(std::move(rng)) {
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::shuffle(order_.begin(), order_.end(), rng_);
    }

    std::vector<std::size_t> next() {
        const std::size_t end = std::min(pos_ + batch_, order_.size());
        std::vector<std::size_t> out(order_.begin() + pos_, order_.begin() + end);
        pos_ = end;
        if (pos_ == order_.size()) {
            std::shuffle(order_.begin(), order_.end(), rng_);
            pos_ = 0;
        }
        return out;
    }

    std::size_t batches_per_pass() const { return (order_.size() + batch_ - 1) / batch_; }

  private:
    std::vector<std::size_t> order_;
    std::size_t batch_;
    std::size_t pos_ = 0;
    Rng rng_;
};

const std::vector<corpus::Sentence>& require(const std::vector<corpus::Sentence>* data, const char* what) {
    if (!data || data->empty()) throw ConfigError(std::string(what) + " corpus is empty");
    return *data;
}

std::vector<numerics::Parameter*> join(std::vector<numerics::Parameter*> a, const std::vector<numerics::Parameter*>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TrainResult train(Model& model, const TrainConfig& config, Task task, const TrainData& data,
                  const TrainOptions& options) {
    config.validate();
    const bool use_dp = task != Task::kSrl;
    const bool use_srl = task != Task::kDp;
    const double beta = task == Task::kDp ? 0.0 : task == Task::kSrl ? 1.0 : config.beta_srl;
    const std::string target = resolve_target(config, task);
    if (target == "uas" && !(use_dp && data.dp_dev && !data.dp_dev->empty())) {
        throw ConfigError("target metric uas needs a DP dev corpus");
    }
    if (target == "micro_f1" && !(use_srl && data.srl_dev && !data.srl_dev->empty())) {
        throw ConfigError("target metric micro_f1 needs an SRL dev corpus");
    }

    TrainResult result;
    InstanceOptions inst_opt;
    inst_opt.max_tokens = options.max_tokens;
    inst_opt.skip_oversize = true;
    std::vector<DpInstance> dp_inst;
    std::vector<SrlInstance> srl_inst;
    if (use_dp) dp_inst = make_dp_instances(model, require(data.dp_train, "DP training"), inst_opt, &result.skipped);
    if (use_srl) {
        srl_inst = make_srl_instances(model, require(data.srl_train, "SRL training"), inst_opt, &result.skipped);
    }
    if (use_dp && dp_inst.empty()) throw DataError("no usable DP training sentences");
    if (use_srl && srl_inst.empty()) throw DataError("no usable SRL training frames");

    const std::size_t batch = static_cast<std::size_t>(config.batch_size);
    std::optional<BatchCycler> dp_batches, srl_batches;
    if (use_dp) dp_batches.emplace(dp_inst.size(), batch, numerics::derive_rng(config.seed, kDpShuffle));
    if (use_srl) srl_batches.emplace(srl_inst.size(), batch, numerics::derive_rng(config.seed, kSrlShuffle));
    const long steps_per_epoch =
        static_cast<long>(use_srl ? srl_batches->batches_per_pass() : dp_batches->batches_per_pass());

    Rng dropout_rng = numerics::derive_rng(config.seed, kDropout);
    Rng task_rng = numerics::derive_rng(config.seed, kTaskDraw);
    std::bernoulli_distribution draw_srl(beta);

    numerics::AdamWConfig adam;
    adam.learning_rate = config.learning_rate;
    adam.weight_decay = config.weight_decay;
    numerics::AdamW optimizer(adam, numerics::LinearWarmup(steps_per_epoch));

    const auto dp_params = use_dp ? join(model.encoder_parameters(), model.dp_parameters()) : std::vector<Parameter*>{};
    const auto srl_params = use_srl ? join(model.encoder_parameters(), model.srl_parameters()) : std::vector<Parameter*>{};
    const auto all = model.all_parameters();

    std::vector<numerics::Tensor> best;
    result.best_metric = -std::numeric_limits<double>::infinity();
    int stale = 0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        EpochRecord rec;
        rec.epoch = epoch;
        double dp_sum = 0.0, srl_sum = 0.0;
        for (long step = 0; step < steps_per_epoch; ++step) {
            const bool srl_step = draw_srl(task_rng);
            if (options.on_draw) options.on_draw(srl_step);
            numerics::Tape tape;
            numerics::Var loss;
            double reported = 0.0;
            const std::vector<Parameter*>* params = nullptr;
            if (srl_step) {
                const auto idx = srl_batches->next();
                std::vector<numerics::Var> terms;
                for (std::size_t i : idx) {
                    const auto& inst = srl_inst[i];
                    numerics::Var hidden = model.encoder().encode(tape, inst.input, true, dropout_rng);
                    terms.push_back(model.srl().loss_sum(tape, hidden, inst.input, inst.gold, true, dropout_rng));
                }
                loss = ops::scale(ops::sum(ops::concat_rows(terms)), 1.0 / static_cast<double>(idx.size()));
                reported = loss.value().item();
                params = &srl_params;
            } else {
                const auto idx = dp_batches->next();
                std::vector<numerics::Var> terms;
                double tokens = 0.0;
                for (std::size_t i : idx) {
                    const auto& inst = dp_inst[i];
                    numerics::Var units = dp_units(tape, model, inst.input, true, dropout_rng);
                    terms.push_back(model.dp().loss_sum(tape, units, inst.head_units, inst.labels, true, dropout_rng));
                    tokens += static_cast<double>(inst.head_units.size());
                }
                numerics::Var j = ops::scale(ops::sum(ops::concat_rows(terms)), 1.0 / tokens);
                reported = j.value().item();
                loss = ops::scale(j, config.lambda_dp);
                params = &dp_params;
            }
            if (!std::isfinite(loss.value().item())) {
                throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                                   std::to_string(step + 1));
            }
            for (Parameter* p : *params) p->zero_grad();
            tape.backward(loss);
            try {
                optimizer.step(*params);
            } catch (const NumericError& e) {
                throw NumericError("epoch " + std::to_string(epoch) + ", step " + std::to_string(step + 1) + ": " +
                                   e.what());
            }
            ++result.steps;
            if (srl_step) {
                ++rec.srl_steps;
                srl_sum += reported;
            } else {
                ++rec.dp_steps;
                dp_sum += reported;
            }
        }
        if (rec.dp_steps > 0) rec.dp_loss = dp_sum / static_cast<double>(rec.dp_steps);
        if (rec.srl_steps > 0) rec.srl_loss = srl_sum / static_cast<double>(rec.srl_steps);

        if (use_dp && data.dp_dev && !data.dp_dev->empty()) rec.dp = evaluate_dp_model(model, *data.dp_dev);
        if (use_srl && data.srl_dev && !data.srl_dev->empty()) rec.srl = evaluate_srl_model(model, *data.srl_dev);
        rec.target = target == "uas" ? rec.dp->uas : rec.srl->micro_f1;
        result.history.push_back(rec);

        if (rec.target > result.best_metric) {
            result.best_metric = rec.target;
            result.best_epoch = epoch;
            stale = 0;
            best.clear();
            for (Parameter* p : all) best.push_back(p->value);
        } else {
            ++stale;
        }
        if (options.on_epoch && !options.on_epoch(rec)) break;
        if (config.stop_at && rec.target >= *config.stop_at) break;
        if (config.patience > 0 && stale >= config.patience) break;
    }

    if (result.best_epoch == 0) result.best_metric = 0.0;
    if (options.restore_best && !best.empty()) {
        for (std::size_t i = 0; i < all.size(); ++i) all[i]->value = best[i];
    }
    return result;
}

TrainResult train_single(Model& model, const TrainConfig& config, Task task, const TrainData& data,
                         const TrainOptions& options) {
    if (task == Task::kMulti) throw ConfigError("train_single needs task dp or srl");
    return train(model, config, task, data, options);
}

TrainResult train_multitask(Model& model, const TrainConfig& config, const TrainData& data,
                            const TrainOptions& options) {
    return train(model, config, Task::kMulti, data, options);
}

json to_json(const EpochRecord& r) {
    json j{{"epoch", r.epoch},       {"dp_steps", r.dp_steps}, {"srl_steps", r.srl_steps},
           {"dp_loss", r.dp_loss},   {"srl_loss", r.srl_loss}, {"target", r.target}};
    if (r.dp) j["dp"] = to_json(*r.dp);
    if (r.srl) j["srl"] = to_json(*r.srl);
    return j;
}

json to_json(const TrainResult& r) {
    json h = json::array();
    for (const auto& e : r.history) h.push_back(to_json(e));
    return {{"history", h},
            {"best_epoch", r.best_epoch},
            {"best_metric", r.best_metric},
            {"skipped", r.skipped},
            {"steps", r.steps}};
}

}  // namespace mtparse::trainer
