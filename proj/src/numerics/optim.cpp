#include "mtparse/numerics/optim.hpp"

#include <algorithm>
#include <cmath>

#include "mtparse/error.hpp"

namespace mtparse::numerics {

double LinearWarmup::factor(long step) const noexcept {
    if (warmup_steps_ <= 0 || step >= warmup_steps_) return 1.0;
    return static_cast<double>(std::max(step, 0L)) / static_cast<double>(warmup_steps_);
}

long AdamW::parameter_steps(const Parameter& p) const {
    auto it = state_.find(&p);
    return it == state_.end() ? 0 : it->second.t;
}

void AdamW::step(std::span<Parameter* const> params) {
    for (const Parameter* p : params) {
        if (p->requires_grad && !p->grad.all_finite()) {
            throw NumericError("non-finite gradient in parameter '" + p->name + "' at optimizer step " +
                               std::to_string(steps_ + 1));
        }
    }
    ++steps_;
    const double lr = config_.learning_rate * schedule_.factor(steps_);
    for (Parameter* p : params) {
        if (!p->requires_grad) continue;
        State& s = state_[p];
        if (s.m.size() != p->value.size()) {
            s.m = Tensor::zeros_like(p->value);
            s.v = Tensor::zeros_like(p->value);
        }
        ++s.t;
        const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(s.t));
        const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(s.t));
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const double g = p->grad[i];
            s.m[i] = config_.beta1 * s.m[i] + (1.0 - config_.beta1) * g;
            s.v[i] = config_.beta2 * s.v[i] + (1.0 - config_.beta2) * g * g;
            const double m_hat = s.m[i] / bc1;
            const double v_hat = s.v[i] / bc2;
            p->value[i] -= lr * config_.weight_decay * p->value[i];
            p->value[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.eps);
        }
    }
}

}  // namespace mtparse::numerics
