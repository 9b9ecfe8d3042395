#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

#include "grnea/core/rng.hpp"

namespace grnea::bench {

struct Bounds {
    std::vector<double> lower, upper;

    int dims() const { return static_cast<int>(lower.size()); }
    void validate() const {
        if (lower.size() != upper.size() || lower.empty())
            throw std::invalid_argument("bounds: inconsistent dimensions");
        for (std::size_t d = 0; d < lower.size(); ++d)
            if (!(lower[d] < upper[d]))
                throw std::invalid_argument("bounds: lower must be < upper");
    }
};

/// Latin hypercube: per dimension a seeded permutation of the n strata, one
/// uniform sample inside each stratum.
inline std::vector<std::vector<double>> lhs_sample(const Bounds& bounds, int n_samples,
                                                   std::uint64_t seed) {
    bounds.validate();
    if (n_samples < 1) throw std::invalid_argument("lhs: n_samples must be >= 1");
    Rng rng = make_rng(seed, 0x1457);
    const int d = bounds.dims();
    std::vector<std::vector<double>> out(n_samples, std::vector<double>(d));
    std::vector<int> strata(n_samples);
    for (int j = 0; j < d; ++j) {
        std::iota(strata.begin(), strata.end(), 0);
        std::shuffle(strata.begin(), strata.end(), rng);
        const double width = (bounds.upper[j] - bounds.lower[j]) / n_samples;
        for (int i = 0; i < n_samples; ++i) {
            const double u = uniform(rng);
            out[i][j] = bounds.lower[j] + (strata[i] + u) * width;
        }
    }
    return out;
}

}  // namespace grnea::bench
