#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "grnea/filter/hsv.hpp"

namespace grnea::filt {

/// Strictly two-valued outline raster. A set bit stands for the HSV triple
/// (0, 0, 255) (white); a clear bit for (0, 0, 0) (black). The pixelwise
/// difference |U_i - U_o| of Eq-style arithmetic sums to 255 exactly where
/// the bits disagree, so the noise count below is the disagreement count.
struct OutlineImage {
    int h = 0, w = 0;
    std::vector<std::uint8_t> white;

    OutlineImage() = default;
    OutlineImage(int h_, int w_) : h(h_), w(w_), white(static_cast<std::size_t>(h_) * w_, 0) {}
    std::uint8_t& at(int y, int x) { return white[static_cast<std::size_t>(y) * w + x]; }
    std::uint8_t at(int y, int x) const { return white[static_cast<std::size_t>(y) * w + x]; }
};

/// White test thresholds and the accept threshold C together with the
/// reference outline of the standard simulated case.
struct FilterConfig {
    int white_s_max = 30;
    int white_v_min = 221;
    int threshold_c = 225;
    OutlineImage reference;
};

/// A pixel turns white iff S <= 30 and V >= 221; hue plays no role (its
/// stated range spans everything). Everything else turns black.
inline OutlineImage binarize_outline(const HsvImage& img, const FilterConfig& cfg) {
    OutlineImage out(img.h, img.w);
    for (std::size_t i = 0; i < img.px.size(); ++i)
        out.white[i] =
            (img.px[i].s <= cfg.white_s_max && img.px[i].v >= cfg.white_v_min) ? 1 : 0;
    return out;
}

/// n_noise = (1/255) * sum over channels of |u_i - u_o|, i.e. the number of
/// pixels on which the outlines disagree.
inline long noise_count(const OutlineImage& a, const OutlineImage& b) {
    if (a.h != b.h || a.w != b.w) throw std::invalid_argument("noise_count: shape mismatch");
    long n = 0;
    for (std::size_t i = 0; i < a.white.size(); ++i) n += (a.white[i] != b.white[i]) ? 1 : 0;
    return n;
}

struct FilterDecision {
    bool reasonable = false;
    long n_noise = 0;
};

/// Accept iff n_noise <= C (strictly more than C rejects).
inline FilterDecision is_reasonable(const Image& image, const FilterConfig& cfg) {
    if (cfg.reference.white.empty())
        throw std::invalid_argument("filter: reference outline not set");
    if (cfg.threshold_c <= 0) throw std::invalid_argument("filter: threshold C must be > 0");
    OutlineImage u = binarize_outline(rgb_to_hsv(image), cfg);
    const long n = noise_count(u, cfg.reference);
    return {n <= cfg.threshold_c, n};
}

/// C = max(1, ceil(empirical quantile of n_noise * safety)). Run over
/// reconstructions of known-good cases.
inline int calibrate_threshold(const std::vector<Image>& reconstructions,
                               const FilterConfig& cfg, double quantile,
                               double safety = 1.2) {
    if (reconstructions.empty())
        throw std::invalid_argument("calibrate_threshold: no reconstructions");
    if (!(quantile > 0.0) || quantile > 1.0)
        throw std::invalid_argument("calibrate_threshold: quantile must be in (0, 1]");
    std::vector<long> noise;
    noise.reserve(reconstructions.size());
    for (const auto& img : reconstructions) {
        OutlineImage u = binarize_outline(rgb_to_hsv(img), cfg);
        noise.push_back(noise_count(u, cfg.reference));
    }
    std::sort(noise.begin(), noise.end());
    const std::size_t idx =
        std::min(noise.size() - 1,
                 static_cast<std::size_t>(std::ceil(quantile * noise.size())) - 1);
    const long q = noise[idx];
    return std::max(1, static_cast<int>(std::ceil(static_cast<double>(q) * safety)));
}

}  // namespace grnea::filt
