#include "mtparse/numerics/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "mtparse/error.hpp"

namespace mtparse::numerics {

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill) : shape_{rows, cols}, values_(rows * cols, fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    const std::size_t n = std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
    if (n != values_.size()) {
        throw ShapeError("tensor " + shape_string() + " needs " + std::to_string(n) + " values, got " +
                         std::to_string(values_.size()));
    }
}

Tensor Tensor::row(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor({1, n}, std::move(values));
}

std::size_t Tensor::rows() const noexcept {
    if (shape_.empty()) return 0;
    if (shape_.size() == 1) return 1;
    std::size_t r = 1;
    for (std::size_t i = 0; i + 1 < shape_.size(); ++i) r *= shape_[i];
    return r;
}

std::size_t Tensor::cols() const noexcept { return shape_.empty() ? 0 : shape_.back(); }

double Tensor::item() const {
    if (values_.size() != 1) throw ShapeError("item() needs a single-element tensor, got " + shape_string());
    return values_[0];
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

void Tensor::add_(const Tensor& other) {
    if (other.size() != size()) throw ShapeError("add_: " + shape_string() + " vs " + other.shape_string());
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
}

bool Tensor::same_shape(const Tensor& other) const noexcept { return rows() == other.rows() && cols() == other.cols(); }

bool Tensor::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Tensor Tensor::reshaped(std::size_t rows, std::size_t cols) const {
    if (rows * cols != size()) throw ShapeError("cannot reshape " + shape_string());
    return Tensor({rows, cols}, values_);
}

std::string Tensor::shape_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(shape_[i]);
    }
    return s + "]";
}

}  // namespace mtparse::numerics
