#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "grnea/core/image.hpp"

namespace grnea::filt {

/// Quantized HSV triple: H in [0, 180), S and V in [0, 255].
struct Hsv8 {
    std::uint8_t h = 0, s = 0, v = 0;
};

struct HsvImage {
    int h = 0, w = 0;
    std::vector<Hsv8> px;

    HsvImage() = default;
    HsvImage(int h_, int w_) : h(h_), w(w_), px(static_cast<std::size_t>(h_) * w_) {}
    Hsv8& at(int y, int x) { return px[static_cast<std::size_t>(y) * w + x]; }
    const Hsv8& at(int y, int x) const { return px[static_cast<std::size_t>(y) * w + x]; }
};

/// Hexcone conversion with the halved-hue convention: H = round(deg / 2)
/// into [0, 180), S and V scaled to [0, 255] and rounded.
inline HsvImage rgb_to_hsv(const Image& img) {
    HsvImage out(img.h, img.w);
    for (int y = 0; y < img.h; ++y) {
        for (int x = 0; x < img.w; ++x) {
            const double r = img.at(y, x, 0), g = img.at(y, x, 1), b = img.at(y, x, 2);
            const double maxc = std::max({r, g, b});
            const double minc = std::min({r, g, b});
            const double delta = maxc - minc;
            double hue = 0.0;
            if (delta > 0.0) {
                if (maxc == r)
                    hue = 60.0 * std::fmod((g - b) / delta, 6.0);
                else if (maxc == g)
                    hue = 60.0 * ((b - r) / delta + 2.0);
                else
                    hue = 60.0 * ((r - g) / delta + 4.0);
                if (hue < 0.0) hue += 360.0;
            }
            const double sat = maxc <= 0.0 ? 0.0 : delta / maxc;
            int h8 = static_cast<int>(std::lround(hue / 2.0));
            if (h8 >= 180) h8 = 0;  // wrap to keep [0, 180)
            out.at(y, x) = {static_cast<std::uint8_t>(h8),
                            static_cast<std::uint8_t>(std::lround(sat * 255.0)),
                            static_cast<std::uint8_t>(std::lround(maxc * 255.0))};
        }
    }
    return out;
}

}  // namespace grnea::filt
