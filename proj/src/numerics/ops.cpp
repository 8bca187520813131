#include "mtparse/numerics/ops.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "mtparse/error.hpp"

namespace mtparse::numerics {

namespace {

[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
    throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " + b.shape_string());
}

void same_tape(const Var& a, const Var& b) {
    if (&a.tape() != &b.tape()) throw ShapeError("operands recorded on different tapes");
}

// C (m x n) += A (m x k) * B (k x n)
void gemm_nn(const Tensor& a, const Tensor& b, Tensor& c) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    const double* A = a.data();
    const double* B = b.data();
    double* C = c.data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double av = A[i * k + p];
            if (av == 0.0) continue;
            const double* brow = B + p * n;
            double* crow = C + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// C (m x n) += A (m x k) * B(n x k)ᵀ
void gemm_nt(const Tensor& a, const Tensor& b, Tensor& c) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    const double* A = a.data();
    const double* B = b.data();
    double* C = c.data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += A[i * k + p] * B[j * k + p];
            C[i * n + j] += s;
        }
    }
}

// C (k x n) += A(m x k)ᵀ * B (m x n)
void gemm_tn(const Tensor& a, const Tensor& b, Tensor& c) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    const double* A = a.data();
    const double* B = b.data();
    double* C = c.data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double av = A[i * k + p];
            if (av == 0.0) continue;
            const double* brow = B + i * n;
            double* crow = C + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

bool needs(const Var& v) { return v.requires_grad(); }

double sigmoid_scalar(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
    same_tape(a, b);
    const Tensor& A = a.value();
    const Tensor& B = b.value();
    if (A.cols() != B.rows()) shape_fail("matmul", A, B);
    Tensor out(A.rows(), B.cols());
    gemm_nn(A, B, out);
    const int ia = a.id(), ib = b.id();
    return a.tape().record(std::move(out), needs(a) || needs(b), [ia, ib](Tape& t, int, const Tensor& g) {
        if (t.requires_grad(ia)) gemm_nt(g, t.value(ib), t.grad(ia));
        if (t.requires_grad(ib)) gemm_tn(t.value(ia), g, t.grad(ib));
    });
}

Var matmul_nt(const Var& a, const Var& b) {
    same_tape(a, b);
    const Tensor& A = a.value();
    const Tensor& B = b.value();
    if (A.cols() != B.cols()) shape_fail("matmul_nt", A, B);
    Tensor out(A.rows(), B.rows());
    gemm_nt(A, B, out);
    const int ia = a.id(), ib = b.id();
    return a.tape().record(std::move(out), needs(a) || needs(b), [ia, ib](Tape& t, int, const Tensor& g) {
        if (t.requires_grad(ia)) gemm_nn(g, t.value(ib), t.grad(ia));
        if (t.requires_grad(ib)) gemm_tn(g, t.value(ia), t.grad(ib));
    });
}

Var add(const Var& a, const Var& b) {
    same_tape(a, b);
    const Tensor& A = a.value();
    const Tensor& B = b.value();
    const bool broadcast = B.rows() == 1 && A.rows() != 1 && B.cols() == A.cols();
    if (!broadcast && !A.same_shape(B)) shape_fail("add", A, B);
    Tensor out({A.rows(), A.cols()}, std::vector<double>(A.values().begin(), A.values().end()));
    const std::size_t cols = A.cols();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += broadcast ? B[i % cols] : B[i];
    const int ia = a.id(), ib = b.id();
    return a.tape().record(std::move(out), needs(a) || needs(b), [ia, ib, broadcast, cols](Tape& t, int, const Tensor& g) {
        if (t.requires_grad(ia)) t.grad(ia).add_(g);
        if (t.requires_grad(ib)) {
            Tensor& gb = t.grad(ib);
            if (broadcast) {
                for (std::size_t i = 0; i < g.size(); ++i) gb[i % cols] += g[i];
            } else {
                gb.add_(g);
            }
        }
    });
}

Var mul(const Var& a, const Var& b) {
    same_tape(a, b);
    const Tensor& A = a.value();
    const Tensor& B = b.value();
    if (!A.same_shape(B)) shape_fail("mul", A, B);
    Tensor out(A.rows(), A.cols());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = A[i] * B[i];
    const int ia = a.id(), ib = b.id();
    return a.tape().record(std::move(out), needs(a) || needs(b), [ia, ib](Tape& t, int, const Tensor& g) {
        if (t.requires_grad(ia)) {
            Tensor& ga = t.grad(ia);
            const Tensor& B = t.value(ib);
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * B[i];
        }
        if (t.requires_grad(ib)) {
            Tensor& gb = t.grad(ib);
            const Tensor& A = t.value(ia);
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * A[i];
        }
    });
}

Var scale(const Var& a, double factor) {
    const Tensor& A = a.value();
    Tensor out(A.rows(), A.cols());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = A[i] * factor;
    const int ia = a.id();
    return a.tape().record(std::move(out), needs(a), [ia, factor](Tape& t, int, const Tensor& g) {
        Tensor& ga = t.grad(ia);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
    });
}

Var tanh(const Var& a) {
    const Tensor& A = a.value();
    Tensor out(A.rows(), A.cols());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(A[i]);
    const int ia = a.id();
    return a.tape().record(std::move(out), needs(a), [ia](Tape& t, int self, const Tensor& g) {
        const Tensor& y = t.value(self);
        Tensor& ga = t.grad(ia);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
    });
}

Var sigmoid(const Var& a) {
    const Tensor& A = a.value();
    Tensor out(A.rows(), A.cols());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigmoid_scalar(A[i]);
    const int ia = a.id();
    return a.tape().record(std::move(out), needs(a), [ia](Tape& t, int self, const Tensor& g) {
        const Tensor& y = t.value(self);
        Tensor& ga = t.grad(ia);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
    });
}

Var sum(const Var& a) {
    const Tensor& A = a.value();
    double s = 0.0;
    for (double v : A.values()) s += v;
    const int ia = a.id();
    return a.tape().record(Tensor::scalar(s), needs(a), [ia](Tape& t, int, const Tensor& g) {
        Tensor& ga = t.grad(ia);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[0];
    });
}

Var concat_cols(std::span<const Var> parts) {
    if (parts.empty()) throw ShapeError("concat_cols: no operands");
    const std::size_t rows = parts[0].rows();
    std::size_t cols = 0;
    bool req = false;
    std::vector<int> ids;
    std::vector<std::size_t> widths;
    for (const auto& p : parts) {
        same_tape(parts[0], p);
        if (p.rows() != rows) shape_fail("concat_cols", parts[0].value(), p.value());
        cols += p.cols();
        req = req || needs(p);
        ids.push_back(p.id());
        widths.push_back(p.cols());
    }
    Tensor out(rows, cols);
    std::size_t offset = 0;
    for (const auto& p : parts) {
        const Tensor& v = p.value();
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < v.cols(); ++c) out(r, offset + c) = v(r, c);
        }
        offset += v.cols();
    }
    return parts[0].tape().record(std::move(out), req, [ids, widths, rows, cols](Tape& t, int, const Tensor& g) {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (t.requires_grad(ids[k])) {
                Tensor& gk = t.grad(ids[k]);
                for (std::size_t r = 0; r < rows; ++r) {
                    for (std::size_t c = 0; c < widths[k]; ++c) gk(r, c) += g[r * cols + offset + c];
                }
            }
            offset += widths[k];
        }
    });
}

Var concat_rows(std::span<const Var> parts) {
    if (parts.empty()) throw ShapeError("concat_rows: no operands");
    const std::size_t cols = parts[0].cols();
    std::vector<double> values;
    std::vector<int> ids;
    std::vector<std::size_t> sizes;
    bool req = false;
    for (const auto& p : parts) {
        same_tape(parts[0], p);
        if (p.cols() != cols) shape_fail("concat_rows", parts[0].value(), p.value());
        const auto v = p.value().values();
        values.insert(values.end(), v.begin(), v.end());
        ids.push_back(p.id());
        sizes.push_back(v.size());
        req = req || needs(p);
    }
    const std::size_t rows = values.size() / (cols ? cols : 1);
    Tensor out({rows, cols}, std::move(values));
    return parts[0].tape().record(std::move(out), req, [ids, sizes](Tape& t, int, const Tensor& g) {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (t.requires_grad(ids[k])) {
                Tensor& gk = t.grad(ids[k]);
                for (std::size_t i = 0; i < sizes[k]; ++i) gk[i] += g[offset + i];
            }
            offset += sizes[k];
        }
    });
}

Var slice_rows(const Var& a, std::size_t begin, std::size_t end) {
    const Tensor& A = a.value();
    if (begin > end || end > A.rows()) {
        throw ShapeError("slice_rows: [" + std::to_string(begin) + "," + std::to_string(end) + ") of " +
                         A.shape_string());
    }
    const std::size_t cols = A.cols();
    Tensor out({end - begin, cols}, std::vector<double>(A.data() + begin * cols, A.data() + end * cols));
    const int ia = a.id();
    return a.tape().record(std::move(out), needs(a), [ia, begin, cols](Tape& t, int, const Tensor& g) {
        Tensor& ga = t.grad(ia);
        for (std::size_t i = 0; i < g.size(); ++i) ga[begin * cols + i] += g[i];
    });
}

Var slice_cols(const Var& a, std::size_t begin, std::size_t end) {
    const Tensor& A = a.value();
    if (begin > end || end > A.cols()) {
        throw ShapeError("slice_cols: [" + std::to_string(begin) + "," + std::to_string(end) + ") of " +
                         A.shape_string());
    }
    const std::size_t rows = A.rows(), width = end - begin, cols = A.cols();
    Tensor out(rows, width);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < width; ++c) out(r, c) = A(r, begin + c);
    }
    const int ia = a.id();
    return a.tape().record(std::move(out), needs(a), [ia, begin, width, rows, cols](Tape& t, int, const Tensor& g) {
        Tensor& ga = t.grad(ia);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < width; ++c) ga[r * cols + begin + c] += g[r * width + c];
        }
    });
}

Var reshape(const Var& a, std::size_t rows, std::size_t cols) {
    Tensor out = a.value().reshaped(rows, cols);
    const int ia = a.id();
    return a.tape().record(std::move(out), needs(a),
                           [ia](Tape& t, int, const Tensor& g) { t.grad(ia).add_(g); });
}

Var gather_rows(const Var& a, std::span<const int> indices) {
    const Tensor& A = a.value();
    const std::size_t cols = A.cols();
    Tensor out(indices.size(), cols);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const int src = indices[r];
        if (src < 0 || static_cast<std::size_t>(src) >= A.rows()) {
            throw ShapeError("gather_rows: index " + std::to_string(src) + " outside " + A.shape_string());
        }
        for (std::size_t c = 0; c < cols; ++c) out(r, c) = A(src, c);
    }
    const int ia = a.id();
    std::vector<int> idx(indices.begin(), indices.end());
    return a.tape().record(std::move(out), needs(a), [ia, idx = std::move(idx), cols](Tape& t, int, const Tensor& g) {
        Tensor& ga = t.grad(ia);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            for (std::size_t c = 0; c < cols; ++c) ga[idx[r] * cols + c] += g[r * cols + c];
        }
    });
}

Var repeat_rows(const Var& a, std::size_t n) {
    const Tensor& A = a.value();
    if (A.rows() != 1) throw ShapeError("repeat_rows: expected a single row, got " + A.shape_string());
    const std::size_t cols = A.cols();
    Tensor out(n, cols);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < cols; ++c) out(r, c) = A[c];
    }
    const int ia = a.id();
    return a.tape().record(std::move(out), needs(a), [ia, cols](Tape& t, int, const Tensor& g) {
        Tensor& ga = t.grad(ia);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i % cols] += g[i];
    });
}

Var pairwise_add(const Var& heads, const Var& dependents) {
    same_tape(heads, dependents);
    const Tensor& A = heads.value();
    const Tensor& B = dependents.value();
    if (A.cols() != B.cols()) shape_fail("pairwise_add", A, B);
    const std::size_t m = A.rows(), n = B.rows(), d = A.cols();
    Tensor out(n * m, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double* row = out.data() + (i * m + j) * d;
            for (std::size_t c = 0; c < d; ++c) row[c] = A(j, c) + B(i, c);
        }
    }
    const int ia = heads.id(), ib = dependents.id();
    return heads.tape().record(std::move(out), needs(heads) || needs(dependents),
                               [ia, ib, m, n, d](Tape& t, int, const Tensor& g) {
                                   const bool ga_on = t.requires_grad(ia), gb_on = t.requires_grad(ib);
                                   for (std::size_t i = 0; i < n; ++i) {
                                       for (std::size_t j = 0; j < m; ++j) {
                                           const double* row = g.data() + (i * m + j) * d;
                                           if (ga_on) {
                                               Tensor& ga = t.grad(ia);
                                               for (std::size_t c = 0; c < d; ++c) ga[j * d + c] += row[c];
                                           }
                                           if (gb_on) {
                                               Tensor& gb = t.grad(ib);
                                               for (std::size_t c = 0; c < d; ++c) gb[i * d + c] += row[c];
                                           }
                                       }
                                   }
                               });
}

Var dropout(const Var& a, const Tensor& mask, double rate) {
    const Tensor& A = a.value();
    if (!A.same_shape(mask)) shape_fail("dropout", A, mask);
    if (!(rate >= 0.0 && rate < 1.0)) throw ShapeError("dropout: rate must lie in [0, 1)");
    const double keep = 1.0 / (1.0 - rate);
    Tensor factor(A.rows(), A.cols());
    for (std::size_t i = 0; i < factor.size(); ++i) factor[i] = mask[i] * keep;
    Tensor out(A.rows(), A.cols());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = A[i] * factor[i];
    const int ia = a.id();
    return a.tape().record(std::move(out), needs(a), [ia, factor = std::move(factor)](Tape& t, int, const Tensor& g) {
        Tensor& ga = t.grad(ia);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor[i];
    });
}

Var mean_over_sets(const Var& a, const std::vector<std::vector<int>>& sets) {
    const Tensor& A = a.value();
    const std::size_t cols = A.cols();
    Tensor out(sets.size(), cols);
    for (std::size_t u = 0; u < sets.size(); ++u) {
        if (sets[u].empty()) throw ShapeError("mean_over_sets: unit " + std::to_string(u) + " has no members");
        for (int r : sets[u]) {
            if (r < 0 || static_cast<std::size_t>(r) >= A.rows()) {
                throw ShapeError("mean_over_sets: row " + std::to_string(r) + " outside " + A.shape_string());
            }
            for (std::size_t c = 0; c < cols; ++c) out(u, c) += A(r, c);
        }
        const double inv = 1.0 / static_cast<double>(sets[u].size());
        for (std::size_t c = 0; c < cols; ++c) out(u, c) *= inv;
    }
    const int ia = a.id();
    return a.tape().record(std::move(out), needs(a), [ia, sets, cols](Tape& t, int, const Tensor& g) {
        Tensor& ga = t.grad(ia);
        for (std::size_t u = 0; u < sets.size(); ++u) {
            const double inv = 1.0 / static_cast<double>(sets[u].size());
            for (int r : sets[u]) {
                for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] += g[u * cols + c] * inv;
            }
        }
    });
}

Var log_softmax(const Var& a, const std::vector<char>& mask) {
    const Tensor& A = a.value();
    if (!mask.empty() && mask.size() != A.size()) {
        throw ShapeError("log_softmax: mask of " + std::to_string(mask.size()) + " entries for " + A.shape_string());
    }
    const std::size_t rows = A.rows(), cols = A.cols();
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    auto masked = [&mask](std::size_t i) { return !mask.empty() && mask[i] != 0; };
    Tensor out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        double mx = kNegInf;
        bool any = false;
        for (std::size_t c = 0; c < cols; ++c) {
            if (masked(r * cols + c)) continue;
            if (!std::isfinite(A(r, c))) {
                throw NumericError("log_softmax: non-finite score in row " + std::to_string(r));
            }
            mx = std::max(mx, A(r, c));
            any = true;
        }
        if (!any) throw ShapeError("log_softmax: row " + std::to_string(r) + " has every entry masked");
        double z = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            if (!masked(r * cols + c)) z += std::exp(A(r, c) - mx);
        }
        const double lse = mx + std::log(z);
        for (std::size_t c = 0; c < cols; ++c) out(r, c) = masked(r * cols + c) ? kNegInf : A(r, c) - lse;
    }
    const int ia = a.id();
    return a.tape().record(std::move(out), needs(a), [ia, rows, cols](Tape& t, int self, const Tensor& g) {
        const Tensor& y = t.value(self);
        Tensor& ga = t.grad(ia);
        for (std::size_t r = 0; r < rows; ++r) {
            double gsum = 0.0;
            for (std::size_t c = 0; c < cols; ++c) {
                if (std::isfinite(y(r, c))) gsum += g(r, c);
            }
            for (std::size_t c = 0; c < cols; ++c) {
                if (std::isfinite(y(r, c))) ga(r, c) += g(r, c) - std::exp(y(r, c)) * gsum;
            }
        }
    });
}

Var pick(const Var& a, std::span<const int> indices) {
    const Tensor& A = a.value();
    if (indices.size() != A.rows()) {
        throw ShapeError("pick: " + std::to_string(indices.size()) + " indices for " + A.shape_string());
    }
    const std::size_t cols = A.cols();
    Tensor out(indices.size(), 1);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        if (indices[r] < 0 || static_cast<std::size_t>(indices[r]) >= cols) {
            throw ShapeError("pick: column " + std::to_string(indices[r]) + " outside " + A.shape_string());
        }
        out[r] = A(r, indices[r]);
    }
    const int ia = a.id();
    std::vector<int> idx(indices.begin(), indices.end());
    return a.tape().record(std::move(out), needs(a), [ia, idx = std::move(idx), cols](Tape& t, int, const Tensor& g) {
        Tensor& ga = t.grad(ia);
        for (std::size_t r = 0; r < idx.size(); ++r) ga[r * cols + idx[r]] += g[r];
    });
}

LstmOutput lstm_cell_step(const Var& x, const Var& h, const Var& c, const Var& w_ih, const Var& w_hh, const Var& b) {
    const Tensor& X = x.value();
    const Tensor& H = h.value();
    const Tensor& C = c.value();
    const Tensor& Wi = w_ih.value();
    const Tensor& Wh = w_hh.value();
    const Tensor& B = b.value();
    const std::size_t hidden = H.cols();
    if (X.rows() != 1 || H.rows() != 1 || !C.same_shape(H)) shape_fail("lstm_cell_step", X, H);
    if (Wi.rows() != X.cols() || Wi.cols() != 4 * hidden) shape_fail("lstm_cell_step", X, Wi);
    if (Wh.rows() != hidden || Wh.cols() != 4 * hidden) shape_fail("lstm_cell_step", H, Wh);
    if (B.size() != 4 * hidden) shape_fail("lstm_cell_step", B, Wi);

    Tensor z({1, 4 * hidden}, std::vector<double>(B.values().begin(), B.values().end()));
    gemm_nn(X, Wi, z);
    gemm_nn(H, Wh, z);

    // Saved activations: i, f, g, o, tanh(c').
    auto acts = std::make_shared<Tensor>(5, hidden);
    Tensor hc(1, 2 * hidden);
    for (std::size_t k = 0; k < hidden; ++k) {
        const double ig = sigmoid_scalar(z[k]);
        const double fg = sigmoid_scalar(z[hidden + k]);
        const double gg = std::tanh(z[2 * hidden + k]);
        const double og = sigmoid_scalar(z[3 * hidden + k]);
        const double cn = fg * C[k] + ig * gg;
        const double tc = std::tanh(cn);
        (*acts)(0, k) = ig;
        (*acts)(1, k) = fg;
        (*acts)(2, k) = gg;
        (*acts)(3, k) = og;
        (*acts)(4, k) = tc;
        hc[k] = og * tc;
        hc[hidden + k] = cn;
    }
    const int ix = x.id(), ih = h.id(), ic = c.id(), iwi = w_ih.id(), iwh = w_hh.id(), ib = b.id();
    const bool req = needs(x) || needs(h) || needs(c) || needs(w_ih) || needs(w_hh) || needs(b);
    Var joint = x.tape().record(std::move(hc), req, [=](Tape& t, int, const Tensor& g) {
        const Tensor& a = *acts;
        const Tensor& Cp = t.value(ic);
        Tensor dz(1, 4 * hidden);
        Tensor dc_prev(1, hidden);
        for (std::size_t k = 0; k < hidden; ++k) {
            const double ig = a(0, k), fg = a(1, k), gg = a(2, k), og = a(3, k), tc = a(4, k);
            const double dh = g[k];
            const double dc = g[hidden + k] + dh * og * (1.0 - tc * tc);
            dz[k] = dc * gg * ig * (1.0 - ig);
            dz[hidden + k] = dc * Cp[k] * fg * (1.0 - fg);
            dz[2 * hidden + k] = dc * ig * (1.0 - gg * gg);
            dz[3 * hidden + k] = dh * tc * og * (1.0 - og);
            dc_prev[k] = dc * fg;
        }
        if (t.requires_grad(ix)) gemm_nt(dz, t.value(iwi), t.grad(ix));
        if (t.requires_grad(ih)) gemm_nt(dz, t.value(iwh), t.grad(ih));
        if (t.requires_grad(ic)) t.grad(ic).add_(dc_prev);
        if (t.requires_grad(iwi)) gemm_tn(t.value(ix), dz, t.grad(iwi));
        if (t.requires_grad(iwh)) gemm_tn(t.value(ih), dz, t.grad(iwh));
        if (t.requires_grad(ib)) t.grad(ib).add_(dz);
    });
    return {slice_cols(joint, 0, hidden), slice_cols(joint, hidden, 2 * hidden)};
}

}  // namespace mtparse::numerics
