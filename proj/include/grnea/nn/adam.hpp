#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "grnea/core/tensor.hpp"

namespace grnea::nn {

/// Adam with bias correction. State is kept per parameter array, keyed by
/// position in the registry, which is stable for a fixed model.
template <typename T>
class AdamOptimizer {
public:
    explicit AdamOptimizer(T learning_rate = T(1e-3), T beta1 = T(0.9), T beta2 = T(0.999),
                           T epsilon = T(1e-8))
        : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
        if (!(learning_rate > T(0)))
            throw std::invalid_argument("adam: learning rate must be > 0");
    }

    long step_count() const { return step_; }
    T learning_rate() const { return lr_; }

    /// Applies one update in place and zeroes the gradients. Rejects
    /// non-finite gradients before touching any state.
    void step(std::vector<ParamRef<T>>& params) {
        for (const auto& p : params)
            for (std::size_t i = 0; i < p.count; ++i)
                if (!std::isfinite(static_cast<double>(p.grad[i])))
                    throw std::runtime_error("adam: non-finite gradient in " + p.name);

        if (slots_.size() != params.size()) {
            slots_.resize(params.size());
            for (std::size_t k = 0; k < params.size(); ++k) {
                slots_[k].m.assign(params[k].count, T(0));
                slots_[k].v.assign(params[k].count, T(0));
            }
        }
        ++step_;
        const T bc1 = T(1) - std::pow(beta1_, static_cast<T>(step_));
        const T bc2 = T(1) - std::pow(beta2_, static_cast<T>(step_));
        for (std::size_t k = 0; k < params.size(); ++k) {
            auto& s = slots_[k];
            auto& p = params[k];
            for (std::size_t i = 0; i < p.count; ++i) {
                const T g = p.grad[i];
                s.m[i] = beta1_ * s.m[i] + (T(1) - beta1_) * g;
                s.v[i] = beta2_ * s.v[i] + (T(1) - beta2_) * g * g;
                const T mhat = s.m[i] / bc1;
                const T vhat = s.v[i] / bc2;
                p.value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
                p.grad[i] = T(0);
            }
        }
    }

private:
    struct Slot {
        std::vector<T> m, v;
    };

    T lr_, beta1_, beta2_, eps_;
    long step_ = 0;
    std::vector<Slot> slots_;
};

}  // namespace grnea::nn
