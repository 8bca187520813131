#pragma once

#include <span>
#include <unordered_map>

#include "mtparse/numerics/tensor.hpp"

namespace mtparse::numerics {

/// Linear ramp from 0 to the base rate over `warmup_steps` steps, flat after.
class LinearWarmup {
  public:
    explicit LinearWarmup(long warmup_steps = 0) : warmup_steps_(warmup_steps) {}
    /// Multiplier for the 1-based step `step`.
    double factor(long step) const noexcept;
    long warmup_steps() const noexcept { return warmup_steps_; }

  private:
    long warmup_steps_;
};

struct AdamWConfig {
    double learning_rate = 1e-3;
    double weight_decay = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// AdamW with decoupled weight decay and bias-corrected moments. Each
/// parameter keeps its own moment estimates and step count, so a parameter
/// left out of a step() call is not touched at all.
class AdamW {
  public:
    AdamW(AdamWConfig config, LinearWarmup schedule) : config_(config), schedule_(schedule) {}

    /// Updates `params` from their current grads. Throws NumericError, leaving
    /// every parameter unchanged, if any gradient is non-finite.
    void step(std::span<Parameter* const> params);

    long steps_taken() const noexcept { return steps_; }
    double current_rate() const noexcept { return config_.learning_rate * schedule_.factor(steps_); }
    const AdamWConfig& config() const noexcept { return config_; }
    /// Number of updates applied to `p` so far (0 if never stepped).
    long parameter_steps(const Parameter& p) const;

  private:
    struct State {
        Tensor m;
        Tensor v;
        long t = 0;
    };
    AdamWConfig config_;
    LinearWarmup schedule_;
    long steps_ = 0;
    std::unordered_map<const Parameter*, State> state_;
};

}  // namespace mtparse::numerics
