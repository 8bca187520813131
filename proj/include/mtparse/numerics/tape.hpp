#pragma once

#include <functional>
#include <vector>

#include "mtparse/numerics/tensor.hpp"

namespace mtparse::numerics {

class Tape;

/// Handle to a value recorded on a Tape.
class Var {
  public:
    Var() = default;
    Var(Tape* tape, int id) : tape_(tape), id_(id) {}

    Tape& tape() const { return *tape_; }
    int id() const noexcept { return id_; }
    bool valid() const noexcept { return tape_ != nullptr; }
    const Tensor& value() const;
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }
    bool requires_grad() const;

  private:
    Tape* tape_ = nullptr;
    int id_ = -1;
};

/// Records executed operations in order. backward() walks the record in
/// reverse, each node adding into its inputs' gradients, so fan-out
/// accumulates. Parameter leaves write straight into Parameter::grad.
class Tape {
  public:
    using BackwardFn = std::function<void(Tape&, int self, const Tensor& out_grad)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Tensor value);
    Var variable(Tensor value);
    Var param(Parameter& p);

    /// Appends an op output. `fn` runs during backward only if some input
    /// requires a gradient; `self` is the output's own node id.
    Var record(Tensor value, bool requires_grad, BackwardFn fn);

    const Tensor& value(int id) const;
    /// Gradient accumulator for node `id`, zero-allocated on first access.
    Tensor& grad(int id);
    const Tensor& grad(const Var& v) { return grad(v.id()); }
    bool requires_grad(int id) const { return nodes_[id].requires_grad; }

    /// Seeds d(loss)/d(loss) = 1 and propagates. Throws ShapeError unless
    /// `loss` holds exactly one element.
    void backward(const Var& loss);

    std::size_t size() const noexcept { return nodes_.size(); }

  private:
    struct Node {
        Tensor value;
        Tensor grad;
        Parameter* param = nullptr;
        bool requires_grad = false;
        BackwardFn backward;
    };
    std::vector<Node> nodes_;
};

}  // namespace mtparse::numerics
