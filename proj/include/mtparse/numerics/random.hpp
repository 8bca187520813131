#pragma once

#include <cstdint>
#include <random>

#include "mtparse/numerics/tape.hpp"

namespace mtparse::numerics {

using Rng = std::mt19937_64;

/// Independent generator for a named purpose derived from one run seed.
Rng derive_rng(std::uint64_t seed, std::uint64_t stream);

/// Uniform(-bound, bound) entries.
Tensor uniform_tensor(std::size_t rows, std::size_t cols, double bound, Rng& rng);
/// Glorot-uniform bound for a fan_in x fan_out weight.
double glorot_bound(std::size_t fan_in, std::size_t fan_out);

/// Bernoulli(1 - rate) keep-mask shaped rows x cols.
Tensor dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng);

/// Dropout in train mode with rate > 0; identity (no tape node) otherwise.
Var apply_dropout(const Var& x, double rate, bool train, Rng& rng);

}  // namespace mtparse::numerics
