#pragma once

#include <span>

#include "mtparse/corpus/sentence.hpp"
#include "mtparse/dp/dp_head.hpp"

namespace mtparse::dp {

struct DpMetrics {
    double uas = 0.0;
    double las = 0.0;
    double root = 0.0;  // sentences whose gold root token is predicted to attach to [ROOT]
    long tokens = 0;
    long sentences = 0;
    long cycles = 0;  // predictions containing a head cycle
};

/// Scores predictions against gold trees sentence by sentence. Throws
/// DataError when counts disagree or a gold tree is missing.
DpMetrics evaluate_dp(std::span<const DpPrediction> predictions, std::span<const corpus::Sentence> gold);

}  // namespace mtparse::dp
