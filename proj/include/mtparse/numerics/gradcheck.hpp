#pragma once

#include <functional>
#include <span>
#include <string>

#include "mtparse/numerics/tape.hpp"

namespace mtparse::numerics {

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::string worst_entry;  // "<param>[<index>]"
    std::size_t entries_checked = 0;
};

/// Compares backward() against central differences for every entry of
/// every parameter. Relative error per entry is
/// |analytic - numeric| / max(|analytic|, |numeric|, floor).
/// `loss` must build a fresh scalar on the tape it is given and be
/// deterministic across calls.
GradCheckResult gradient_check(std::span<Parameter* const> params, const std::function<Var(Tape&)>& loss,
                               double eps = 1e-5, double floor = 1e-6);

}  // namespace mtparse::numerics
