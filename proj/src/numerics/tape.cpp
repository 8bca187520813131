#include "mtparse/numerics/tape.hpp"

#include "mtparse/error.hpp"

namespace mtparse::numerics {

const Tensor& Var::value() const { return tape_->value(id_); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

Var Tape::constant(Tensor value) {
    nodes_.push_back(Node{std::move(value), {}, nullptr, false, {}});
    return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::variable(Tensor value) {
    nodes_.push_back(Node{std::move(value), {}, nullptr, true, {}});
    return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::param(Parameter& p) {
    nodes_.push_back(Node{{}, {}, &p, p.requires_grad, {}});
    return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::record(Tensor value, bool requires_grad, BackwardFn fn) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    if (requires_grad) n.backward = std::move(fn);
    nodes_.push_back(std::move(n));
    return {this, static_cast<int>(nodes_.size()) - 1};
}

const Tensor& Tape::value(int id) const {
    const Node& n = nodes_[id];
    return n.param ? n.param->value : n.value;
}

Tensor& Tape::grad(int id) {
    Node& n = nodes_[id];
    if (n.param) {
        if (n.param->grad.size() != n.param->value.size()) n.param->grad = Tensor::zeros_like(n.param->value);
        return n.param->grad;
    }
    if (n.grad.size() != n.value.size() || n.grad.empty()) n.grad = Tensor::zeros_like(n.value);
    return n.grad;
}

void Tape::backward(const Var& loss) {
    if (loss.value().size() != 1) {
        throw ShapeError("backward needs a scalar loss, got " + loss.value().shape_string());
    }
    grad(loss.id())[0] += 1.0;
    for (int i = loss.id(); i >= 0; --i) {
        Node& n = nodes_[i];
        if (!n.backward || !n.requires_grad || n.grad.empty()) continue;
        n.backward(*this, i, n.grad);
    }
}

}  // namespace mtparse::numerics
