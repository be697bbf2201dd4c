#ifndef CARTOGAN_TENSOR_HPP
#define CARTOGAN_TENSOR_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace cartogan::ag {

// Dense NCHW shape. Scalars are (1,1,1,1).
struct Shape {
    int n = 1, c = 1, h = 1, w = 1;

    std::size_t numel() const {
        return std::size_t(n) * std::size_t(c) * std::size_t(h) * std::size_t(w);
    }
    bool operator==(const Shape&) const = default;
    std::string str() const {
        return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
               std::to_string(w) + ")";
    }
};

template <typename T>
struct TensorNode {
    Shape shape;
    std::vector<T> value;
    std::vector<T> grad; // allocated on demand, same length as value
    bool requires_grad = false;

    void ensure_grad() {
        if (grad.size() != value.size()) grad.assign(value.size(), T(0));
    }
};

// Value-semantics handle to a shared tensor node. Copies alias the same
// storage; ops return fresh nodes.
template <typename T>
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::shared_ptr<TensorNode<T>> n) : node_(std::move(n)) {}

    static Tensor zeros(Shape s, bool requires_grad = false) {
        auto n = std::make_shared<TensorNode<T>>();
        n->shape = s;
        n->value.assign(s.numel(), T(0));
        n->requires_grad = requires_grad;
        return Tensor(std::move(n));
    }
    static Tensor full(Shape s, T v, bool requires_grad = false) {
        Tensor t = zeros(s, requires_grad);
        for (auto& x : t.data()) x = v;
        return t;
    }
    static Tensor from_data(Shape s, std::vector<T> data, bool requires_grad = false) {
        if (data.size() != s.numel())
            throw std::invalid_argument("Tensor::from_data: size mismatch for shape " + s.str());
        auto n = std::make_shared<TensorNode<T>>();
        n->shape = s;
        n->value = std::move(data);
        n->requires_grad = requires_grad;
        return Tensor(std::move(n));
    }

    // Handle semantics: a const Tensor still exposes mutable node storage,
    // exactly like a const shared_ptr.
    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    std::size_t numel() const { return node_->shape.numel(); }

    std::vector<T>& data() const { return node_->value; }

    std::vector<T>& grad() const {
        node_->ensure_grad();
        return node_->grad;
    }
    bool has_grad() const { return !node_->grad.empty(); }

    bool requires_grad() const { return node_->requires_grad; }
    void set_requires_grad(bool v) const { node_->requires_grad = v; }

    void zero_grad() const {
        node_->ensure_grad();
        std::fill(node_->grad.begin(), node_->grad.end(), T(0));
    }

    T scalar() const {
        if (numel() != 1) throw std::invalid_argument("Tensor::scalar: tensor is not scalar");
        return node_->value[0];
    }

    TensorNode<T>* node() const { return node_.get(); }
    std::shared_ptr<TensorNode<T>> ptr() const { return node_; }

    bool same_node(const Tensor& o) const { return node_ == o.node_; }

private:
    std::shared_ptr<TensorNode<T>> node_;
};

// Execution-ordered record of op backward closures. Reverse replay visits
// each recorded op exactly once; reverse execution order is a valid reverse
// topological order of the DAG. Output (non-leaf) gradients are reset at
// the start of every backward pass so leaves accumulate additively across
// repeated backward() calls.
template <typename T>
class Tape {
public:
    void record(const Tensor<T>& out, std::function<void()> back) {
        steps_.push_back({out.ptr(), std::move(back)});
    }

    void backward(const Tensor<T>& loss) {
        if (loss.numel() != 1) throw std::invalid_argument("backward: loss must be scalar");
        for (auto& s : steps_) {
            s.out->ensure_grad();
            std::fill(s.out->grad.begin(), s.out->grad.end(), T(0));
        }
        loss.node()->ensure_grad();
        loss.node()->grad[0] = T(1);
        for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) it->back();
    }

    void clear() { steps_.clear(); }
    std::size_t size() const { return steps_.size(); }

private:
    struct Step {
        std::shared_ptr<TensorNode<T>> out;
        std::function<void()> back;
    };
    std::vector<Step> steps_;
};

} // namespace cartogan::ag

#endif
