#include "mtparse/numerics/random.hpp"

#include <cmath>

#include "mtparse/numerics/ops.hpp"

namespace mtparse::numerics {

Rng derive_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x6d747032u};
    return Rng(seq);
}

Tensor uniform_tensor(std::size_t rows, std::size_t cols, double bound, Rng& rng) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    Tensor t(rows, cols);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(rng);
    return t;
}

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Tensor dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Tensor m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = u(rng) >= rate ? 1.0 : 0.0;
    return m;
}

Var apply_dropout(const Var& x, double rate, bool train, Rng& rng) {
    if (!train || rate <= 0.0) return x;
    return dropout(x, dropout_mask(x.rows(), x.cols(), rate, rng), rate);
}

}  // namespace mtparse::numerics
