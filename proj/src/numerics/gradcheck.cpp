#include "mtparse/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace mtparse::numerics {

GradCheckResult gradient_check(std::span<Parameter* const> params, const std::function<Var(Tape&)>& loss,
                               double eps, double floor) {
    for (Parameter* p : params) p->zero_grad();
    {
        Tape tape;
        tape.backward(loss(tape));
    }
    auto evaluate = [&] {
        Tape tape;
        return loss(tape).value().item();
    };

    GradCheckResult result;
    for (Parameter* p : params) {
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const double saved = p->value[i];
            p->value[i] = saved + eps;
            const double up = evaluate();
            p->value[i] = saved - eps;
            const double down = evaluate();
            p->value[i] = saved;

            const double numeric = (up - down) / (2.0 * eps);
            const double analytic = p->grad[i];
            const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
            const double rel = std::abs(analytic - numeric) / denom;
            ++result.entries_checked;
            if (result.entries_checked == 1 || rel > result.max_relative_error) {
                result.max_relative_error = rel;
                result.worst_entry = p->name + "[" + std::to_string(i) + "]";
            }
        }
    }
    return result;
}

}  // namespace mtparse::numerics
