#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "grnea/core/image.hpp"

namespace grnea::pipe {

/// Minimal deterministic line plot: white canvas, gray frame and grid,
/// one polyline. Enough for a convergence curve without pulling a plotting
/// dependency into the build.
inline Image render_line_plot(const std::vector<double>& xs, const std::vector<double>& ys,
                              int width = 640, int height = 400) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("plot: need matching series with >= 2 points");
    Image img(height, width);
    img.fill(1.0f, 1.0f, 1.0f);
    const int ml = 48, mr = 16, mt = 16, mb = 32;  // margins
    const int x0 = ml, x1 = width - mr, y0 = mt, y1 = height - mb;

    double xmin = xs.front(), xmax = xs.front(), ymin = ys.front(), ymax = ys.front();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xmin = std::min(xmin, xs[i]);
        xmax = std::max(xmax, xs[i]);
        ymin = std::min(ymin, ys[i]);
        ymax = std::max(ymax, ys[i]);
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    auto px = [&](double x) {
        return x0 + static_cast<int>(std::lround((x - xmin) / (xmax - xmin) * (x1 - x0)));
    };
    auto py = [&](double y) {
        return y1 - static_cast<int>(std::lround((y - ymin) / (ymax - ymin) * (y1 - y0)));
    };
    auto set = [&](int x, int y, float r, float g, float b) {
        if (x < 0 || x >= width || y < 0 || y >= height) return;
        img.at(y, x, 0) = r;
        img.at(y, x, 1) = g;
        img.at(y, x, 2) = b;
    };

    // frame and quarter grid
    for (int x = x0; x <= x1; ++x) {
        set(x, y0, 0.6f, 0.6f, 0.6f);
        set(x, y1, 0.2f, 0.2f, 0.2f);
        for (int q = 1; q < 4; ++q) set(x, y0 + q * (y1 - y0) / 4, 0.9f, 0.9f, 0.9f);
    }
    for (int y = y0; y <= y1; ++y) {
        set(x0, y, 0.2f, 0.2f, 0.2f);
        set(x1, y, 0.6f, 0.6f, 0.6f);
        for (int q = 1; q < 4; ++q) set(x0 + q * (x1 - x0) / 4, y, 0.9f, 0.9f, 0.9f);
    }

    // polyline
    for (std::size_t i = 1; i < xs.size(); ++i) {
        int ax = px(xs[i - 1]), ay = py(ys[i - 1]);
        int bx = px(xs[i]), by = py(ys[i]);
        const int steps = std::max({std::abs(bx - ax), std::abs(by - ay), 1});
        for (int s = 0; s <= steps; ++s) {
            const int x = ax + (bx - ax) * s / steps;
            const int y = ay + (by - ay) * s / steps;
            set(x, y, 0.05f, 0.25f, 0.75f);
            set(x, y + 1, 0.05f, 0.25f, 0.75f);
        }
    }
    return img;
}

}  // namespace grnea::pipe
