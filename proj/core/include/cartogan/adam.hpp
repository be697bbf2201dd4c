#ifndef CARTOGAN_ADAM_HPP
#define CARTOGAN_ADAM_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cartogan/tensor.hpp"

namespace cartogan::ag {

struct AdamConfig {
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Standard Adam with bias correction over a fixed parameter list. Moments
// live in the parameter precision.
template <typename T>
class AdamState {
public:
    AdamState() = default;

    AdamState(std::vector<Tensor<T>> params, AdamConfig cfg) : cfg_(cfg), params_(std::move(params)) {
        if (cfg_.lr <= 0) throw std::invalid_argument("adam: lr must be positive");
        m_.resize(params_.size());
        v_.resize(params_.size());
        for (std::size_t i = 0; i < params_.size(); ++i) {
            m_[i].assign(params_[i].numel(), T(0));
            v_[i].assign(params_[i].numel(), T(0));
        }
    }

    void step() {
        ++t_;
        T bc1 = T(1) - T(std::pow(cfg_.beta1, double(t_)));
        T bc2 = T(1) - T(std::pow(cfg_.beta2, double(t_)));
        T b1 = T(cfg_.beta1), b2 = T(cfg_.beta2);
        T lr = T(cfg_.lr), eps = T(cfg_.eps);
        for (std::size_t i = 0; i < params_.size(); ++i) {
            auto& p = params_[i].data();
            auto& g = params_[i].grad();
            T* m = m_[i].data();
            T* v = v_[i].data();
            for (std::size_t j = 0; j < p.size(); ++j) {
                m[j] = b1 * m[j] + (T(1) - b1) * g[j];
                v[j] = b2 * v[j] + (T(1) - b2) * g[j] * g[j];
                T mhat = m[j] / bc1;
                T vhat = v[j] / bc2;
                p[j] -= lr * mhat / (std::sqrt(vhat) + eps);
            }
        }
    }

    void zero_grads() {
        for (auto& p : params_) p.zero_grad();
    }

    long long step_count() const { return t_; }
    void set_step_count(long long t) { t_ = t; }
    const AdamConfig& config() const { return cfg_; }
    std::size_t param_count() const { return params_.size(); }
    std::vector<T>& moment1(std::size_t i) { return m_[i]; }
    std::vector<T>& moment2(std::size_t i) { return v_[i]; }
    const Tensor<T>& param(std::size_t i) const { return params_[i]; }

private:
    AdamConfig cfg_;
    std::vector<Tensor<T>> params_;
    std::vector<std::vector<T>> m_, v_;
    long long t_ = 0;
};

// Single free-function step matching the op contract; used by the tests'
// scalar oracle comparisons.
template <typename T>
void adam_step(AdamState<T>& state) {
    state.step();
}

} // namespace cartogan::ag

#endif
