#pragma once

#include <algorithm>
#include <array>

namespace grnea::bench {

/// Fixed 5-stop blue->cyan->green->yellow->red lookup, version 1. Every stop
/// has a zero channel, so no mapped color can pass the white test of the
/// case filter; renders stay byte-reproducible as long as this table and its
/// version stand.
constexpr int kColormapVersion = 1;
constexpr std::array<std::array<float, 3>, 5> kColormapStops{{
    {0.0f, 0.0f, 1.0f},
    {0.0f, 1.0f, 1.0f},
    {0.0f, 1.0f, 0.0f},
    {1.0f, 1.0f, 0.0f},
    {1.0f, 0.0f, 0.0f},
}};

inline std::array<float, 3> colormap(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const double scaled = t * (kColormapStops.size() - 1);
    const int i = std::min(static_cast<int>(scaled), static_cast<int>(kColormapStops.size()) - 2);
    const float f = static_cast<float>(scaled - i);
    std::array<float, 3> out;
    for (int c = 0; c < 3; ++c)
        out[c] = kColormapStops[i][c] * (1.0f - f) + kColormapStops[i + 1][c] * f;
    return out;
}

}  // namespace grnea::bench
