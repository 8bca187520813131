#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mtparse/numerics/tape.hpp"

namespace mtparse::numerics {

// Differentiable ops over rank-2 values. Every op throws ShapeError naming
// both shapes on a mismatch.

Var matmul(const Var& a, const Var& b);     // a b
Var matmul_nt(const Var& a, const Var& b);  // a bᵀ
/// Elementwise sum; `b` may also be a single row broadcast over a's rows.
Var add(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double factor);
Var tanh(const Var& a);
Var sigmoid(const Var& a);
Var sum(const Var& a);

Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var slice_rows(const Var& a, std::size_t begin, std::size_t end);
Var slice_cols(const Var& a, std::size_t begin, std::size_t end);
Var reshape(const Var& a, std::size_t rows, std::size_t cols);
/// Row i of the output is row indices[i] of `a`.
Var gather_rows(const Var& a, std::span<const int> indices);
/// Rows of an embedding table.
inline Var embedding(const Var& table, std::span<const int> ids) { return gather_rows(table, ids); }
/// Stacks `n` copies of a single-row value.
Var repeat_rows(const Var& a, std::size_t n);
/// For heads A (m x d) and dependents B (n x d): row i*m + j is A_j + B_i.
Var pairwise_add(const Var& heads, const Var& dependents);

/// a * mask / (1 - rate); mask holds 0/1 entries shaped like a.
Var dropout(const Var& a, const Tensor& mask, double rate);
/// Row u of the output is the mean of the rows of `a` listed in sets[u].
Var mean_over_sets(const Var& a, const std::vector<std::vector<int>>& sets);

/// Row-wise log-softmax. Entries with mask != 0 are excluded: value -inf,
/// zero gradient. A row with every entry masked is an error.
Var log_softmax(const Var& a, const std::vector<char>& mask = {});
/// Output (n x 1) with out[r] = a(r, indices[r]).
Var pick(const Var& a, std::span<const int> indices);

struct LstmOutput {
    Var h;
    Var c;
};
/// One LSTM step, gate order (input, forget, cell, output):
///   z = x W_ih + h W_hh + b;  c' = σ(z_f) c + σ(z_i) tanh(z_g);  h' = σ(z_o) tanh(c')
/// x is 1 x in, h and c are 1 x H, W_ih is in x 4H, W_hh is H x 4H, b is 1 x 4H.
LstmOutput lstm_cell_step(const Var& x, const Var& h, const Var& c, const Var& w_ih, const Var& w_hh, const Var& b);

}  // namespace mtparse::numerics
