#pragma once

#include <cmath>
#include <vector>

#include "grnea/core/rng.hpp"
#include "grnea/core/tensor.hpp"

namespace grnea::nn {

/// Diagonal Gaussian over the latent code: mean and log-variance per dim.
template <typename T>
struct GaussianLatent {
    std::vector<T> mu;
    std::vector<T> log_var;

    int dim() const { return static_cast<int>(mu.size()); }
};

/// z = mu + sigma * u with u ~ N(0, I); deterministic for a fixed rng state.
template <typename T>
std::vector<T> reparameterize(const GaussianLatent<T>& latent, Rng& rng) {
    std::vector<T> z(latent.mu.size());
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t j = 0; j < z.size(); ++j) {
        const T sigma = std::exp(latent.log_var[j] / T(2));
        z[j] = latent.mu[j] + sigma * static_cast<T>(normal(rng));
    }
    return z;
}

/// KL(q(z|x) || N(0, I)) = -1/2 sum_j (1 + log var_j - mu_j^2 - var_j).
template <typename T>
T kl_divergence(const GaussianLatent<T>& latent) {
    T acc = T(0);
    for (std::size_t j = 0; j < latent.mu.size(); ++j) {
        const T lv = latent.log_var[j];
        acc += T(1) + lv - latent.mu[j] * latent.mu[j] - std::exp(lv);
    }
    return -acc / T(2);
}

/// Mean squared error over all elements.
template <typename T>
T mse(const Tensor4<T>& a, const Tensor4<T>& b) {
    check_same_shape(a, b, "mse");
    T acc = T(0);
    const T* av = a.data();
    const T* bv = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const T d = av[i] - bv[i];
        acc += d * d;
    }
    return acc / static_cast<T>(a.size());
}

/// Per-pixel-mean reconstruction error plus kl_weight times the
/// per-dimension-averaged KL divergence.
template <typename T>
T vae_loss(const Tensor4<T>& reconstruction, const Tensor4<T>& target,
           const GaussianLatent<T>& latent, T kl_weight) {
    check_same_shape(reconstruction, target, "vae_loss");
    if (kl_weight < T(0)) throw std::invalid_argument("vae_loss: kl_weight must be >= 0");
    return mse(reconstruction, target) +
           kl_weight * kl_divergence(latent) / static_cast<T>(latent.dim());
}

}  // namespace grnea::nn
