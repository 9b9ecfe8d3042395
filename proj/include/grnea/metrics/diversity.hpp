#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "grnea/core/image.hpp"

namespace grnea::metrics {

/// Abstract image classifier: maps an image to a probability vector over K
/// classes. The score below works against any such provider.
class ClassProbProvider {
public:
    virtual ~ClassProbProvider() = default;
    virtual std::vector<double> class_probs(const Image& img) const = 0;
};

/// exp of the mean KL between per-image class distributions and their
/// marginal. 1 for a provider that cannot tell images apart.
inline double inception_score(const std::vector<Image>& images, const ClassProbProvider& provider) {
    if (images.empty()) throw std::invalid_argument("inception_score: no images");
    std::vector<std::vector<double>> probs;
    probs.reserve(images.size());
    std::size_t k = 0;
    for (const auto& img : images) {
        auto p = provider.class_probs(img);
        if (probs.empty())
            k = p.size();
        else if (p.size() != k)
            throw std::invalid_argument("inception_score: provider class count varies");
        double sum = 0.0;
        for (double v : p) {
            if (v < 0.0) throw std::invalid_argument("inception_score: negative probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw std::invalid_argument("inception_score: probabilities do not sum to 1");
        probs.push_back(std::move(p));
    }
    std::vector<double> marginal(k, 0.0);
    for (const auto& p : probs)
        for (std::size_t i = 0; i < k; ++i) marginal[i] += p[i];
    for (auto& v : marginal) v /= static_cast<double>(probs.size());

    double mean_kl = 0.0;
    for (const auto& p : probs) {
        double kl = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            if (p[i] <= 0.0) continue;  // 0 * log 0 := 0
            kl += p[i] * std::log(p[i] / std::max(marginal[i], 1e-12));
        }
        mean_kl += kl;
    }
    mean_kl /= static_cast<double>(probs.size());
    return std::exp(mean_kl);
}

struct CdrResult {
    double mean = 0.0;
    double variance = 0.0;
    bool pass = false;
};

/// Case-Diversity Rule: min-max normalize objectives into [0,1] (clipped)
/// and require uniform-distribution moments, mean ~ 0.5 and variance ~ 1/12.
inline CdrResult cdr(const std::vector<double>& objectives, double norm_min, double norm_max,
                     double tol_mean = 0.15, double tol_var = 0.03) {
    if (objectives.size() < 100) throw std::invalid_argument("cdr: need at least 100 cases");
    if (!(norm_max > norm_min)) throw std::invalid_argument("cdr: degenerate normalization range");
    const double range = norm_max - norm_min;
    double mean = 0.0;
    std::vector<double> normed(objectives.size());
    for (std::size_t i = 0; i < objectives.size(); ++i) {
        normed[i] = std::clamp((objectives[i] - norm_min) / range, 0.0, 1.0);
        mean += normed[i];
    }
    mean /= static_cast<double>(normed.size());
    double var = 0.0;
    for (double v : normed) var += (v - mean) * (v - mean);
    var /= static_cast<double>(normed.size());

    CdrResult r;
    r.mean = mean;
    r.variance = var;
    r.pass = std::abs(mean - 0.5) <= tol_mean && std::abs(var - 1.0 / 12.0) <= tol_var;
    return r;
}

}  // namespace grnea::metrics
