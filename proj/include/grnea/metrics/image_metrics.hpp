#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "grnea/core/image.hpp"

namespace grnea::metrics {

/// Mean squared error over all H*W*3 entries, computed in double.
inline double mse(const Image& a, const Image& b) {
    if (a.h != b.h || a.w != b.w) throw std::invalid_argument("mse: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.px.size(); ++i) {
        const double d = static_cast<double>(a.px[i]) - static_cast<double>(b.px[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(a.px.size());
}

/// 20 log10(p_max) - 10 log10(mse), in dB. A zero error reports +inf.
inline double psnr(double mse_value, double p_max) {
    if (mse_value < 0.0) throw std::invalid_argument("psnr: negative mse");
    if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(p_max) - 10.0 * std::log10(mse_value);
}

struct SsimConstants {
    double L = 1.0;  // dynamic range of the pixel values
    double k1 = 0.01;
    double k2 = 0.03;
    double c1() const { return (k1 * L) * (k1 * L); }
    double c2() const { return (k2 * L) * (k2 * L); }
};

/// Whole-image SSIM: global means/variances/covariance per channel, averaged
/// over the three channels. No sliding window.
inline double ssim(const Image& a, const Image& b, const SsimConstants& k = SsimConstants{}) {
    if (a.h != b.h || a.w != b.w) throw std::invalid_argument("ssim: shape mismatch");
    const std::size_t n = a.pixel_count();
    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
        double ma = 0.0, mb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ma += a.px[3 * i + c];
            mb += b.px[3 * i + c];
        }
        ma /= static_cast<double>(n);
        mb /= static_cast<double>(n);
        double va = 0.0, vb = 0.0, cov = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double da = a.px[3 * i + c] - ma;
            const double db = b.px[3 * i + c] - mb;
            va += da * da;
            vb += db * db;
            cov += da * db;
        }
        va /= static_cast<double>(n);
        vb /= static_cast<double>(n);
        cov /= static_cast<double>(n);
        total += ((2.0 * ma * mb + k.c1()) * (2.0 * cov + k.c2())) /
                 ((ma * ma + mb * mb + k.c1()) * (va + vb + k.c2()));
    }
    return total / 3.0;
}

}  // namespace grnea::metrics
