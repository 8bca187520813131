#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mtparse::numerics {

/// Dense row-major float64 tensor. Ops work on rank-2 views; a rank-1 tensor
/// of length n reads as 1 x n.
class Tensor {
  public:
    Tensor() = default;
    Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
    Tensor(std::vector<std::size_t> shape, std::vector<double> values);

    static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape_, std::vector<double>(t.size(), 0.0)); }
    static Tensor scalar(double v) { return Tensor(1, 1, v); }
    static Tensor row(std::vector<double> values);

    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty() && shape_.empty(); }
    std::size_t rows() const noexcept;
    std::size_t cols() const noexcept;

    double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols() + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols() + c]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double item() const;

    double* data() noexcept { return values_.data(); }
    const double* data() const noexcept { return values_.data(); }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    void fill(double v);
    void add_(const Tensor& other);  // this += other, same size
    bool same_shape(const Tensor& other) const noexcept;
    bool all_finite() const noexcept;
    Tensor reshaped(std::size_t rows, std::size_t cols) const;
    std::string shape_string() const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

  private:
    std::vector<std::size_t> shape_;
    std::vector<double> values_;
};

/// A trainable leaf: value plus gradient accumulator of the same shape.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;
    bool requires_grad = true;

    Parameter() = default;
    Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(Tensor::zeros_like(value)) {}

    void zero_grad() { grad.fill(0.0); }
};

}  // namespace mtparse::numerics
