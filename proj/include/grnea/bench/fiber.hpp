#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "grnea/bench/colormap.hpp"
#include "grnea/bench/lhs.hpp"
#include "grnea/core/image.hpp"
#include "grnea/core/threading.hpp"

namespace grnea::bench {

/// Fiber-path field over a square hole-plate: z(x, y) = x + a1 y + a2 x y +
/// a3 x^2 + a4 y^2, rendered as a colormapped raster, with the objective
/// "largest |dz/dy| anywhere on the plate" to be minimized.
struct FiberBenchmark {
    // predefined coefficients; the design box is [0.5 a_i, 1.5 a_i] per dim
    std::array<double, 4> predefined{-0.8, 0.5, -1.2, -10.0};
    double hole_radius = 0.2;  // plate is the unit square, hole centered
    int objective_grid = 64;   // evaluation grid for the max-derivative scan

    Bounds bounds() const {
        Bounds b;
        for (double a : predefined) {
            b.lower.push_back(std::min(0.5 * a, 1.5 * a));
            b.upper.push_back(std::max(0.5 * a, 1.5 * a));
        }
        return b;
    }

    std::vector<double> midpoint() const {
        std::vector<double> m;
        for (double a : predefined) m.push_back(a);  // box center is the predefined value
        return m;
    }

    bool inside_plate(double x, double y) const {
        const double dx = x - 0.5, dy = y - 0.5;
        return dx * dx + dy * dy >= hole_radius * hole_radius;
    }
};

inline double fiber_field(const std::vector<double>& alpha, double x, double y) {
    return x + alpha[0] * y + alpha[1] * x * y + alpha[2] * x * x + alpha[3] * y * y;
}

/// max over the masked plate grid of |dz/dy| = |a1 + a2 x + 2 a4 y|.
inline double fiber_true_objective(const FiberBenchmark& bench, const std::vector<double>& alpha) {
    const int g = bench.objective_grid;
    double worst = 0.0;
    for (int i = 0; i < g; ++i) {
        const double y = static_cast<double>(i) / (g - 1);
        for (int j = 0; j < g; ++j) {
            const double x = static_cast<double>(j) / (g - 1);
            if (!bench.inside_plate(x, y)) continue;
            const double grad = std::abs(alpha[0] + alpha[1] * x + 2.0 * alpha[3] * y);
            worst = std::max(worst, grad);
        }
    }
    return worst;
}

/// Raster of z over the plate: white margin frame, white hole, colormapped
/// field elsewhere, min-max normalized per image.
inline Image fiber_render(const FiberBenchmark& bench, const std::vector<double>& alpha,
                          int resolution) {
    Image img(resolution, resolution);
    img.fill(1.0f, 1.0f, 1.0f);
    const int margin = std::max(1, resolution / 16);
    const int inner = resolution - 2 * margin;

    double zmin = std::numeric_limits<double>::max();
    double zmax = std::numeric_limits<double>::lowest();
    std::vector<double> field(static_cast<std::size_t>(inner) * inner,
                              std::numeric_limits<double>::quiet_NaN());
    for (int r = 0; r < inner; ++r) {
        const double y = (r + 0.5) / inner;
        for (int c = 0; c < inner; ++c) {
            const double x = (c + 0.5) / inner;
            if (!bench.inside_plate(x, y)) continue;
            const double z = fiber_field(alpha, x, y);
            field[static_cast<std::size_t>(r) * inner + c] = z;
            zmin = std::min(zmin, z);
            zmax = std::max(zmax, z);
        }
    }
    const double range = zmax > zmin ? zmax - zmin : 1.0;
    for (int r = 0; r < inner; ++r)
        for (int c = 0; c < inner; ++c) {
            const double z = field[static_cast<std::size_t>(r) * inner + c];
            if (std::isnan(z)) continue;  // hole stays white
            const auto rgb = colormap((z - zmin) / range);
            for (int ch = 0; ch < 3; ++ch) img.at(margin + r, margin + c, ch) = rgb[ch];
        }
    return img;
}

/// Dense-grid reference optimum. The derivative field never involves a3, so
/// the scan covers (a1, a2, a4) with a3 held at the box midpoint.
inline std::pair<std::vector<double>, double> fiber_grid_oracle(const FiberBenchmark& bench,
                                                                int points_per_dim = 101) {
    const Bounds b = bench.bounds();
    const std::array<int, 3> dims{0, 1, 3};
    std::vector<double> alpha = bench.midpoint();
    std::vector<double> best_alpha = alpha;
    double best = std::numeric_limits<double>::max();

    std::vector<double> bests(points_per_dim, std::numeric_limits<double>::max());
    std::vector<std::vector<double>> best_alphas(points_per_dim, alpha);
    parallel_for(points_per_dim, [&](std::size_t i0) {
        std::vector<double> a = bench.midpoint();
        a[dims[0]] = b.lower[dims[0]] +
                     (b.upper[dims[0]] - b.lower[dims[0]]) * static_cast<double>(i0) /
                         (points_per_dim - 1);
        for (int i1 = 0; i1 < points_per_dim; ++i1) {
            a[dims[1]] = b.lower[dims[1]] + (b.upper[dims[1]] - b.lower[dims[1]]) *
                                                static_cast<double>(i1) / (points_per_dim - 1);
            for (int i2 = 0; i2 < points_per_dim; ++i2) {
                a[dims[2]] = b.lower[dims[2]] + (b.upper[dims[2]] - b.lower[dims[2]]) *
                                                    static_cast<double>(i2) / (points_per_dim - 1);
                const double v = fiber_true_objective(bench, a);
                if (v < bests[i0]) {
                    bests[i0] = v;
                    best_alphas[i0] = a;
                }
            }
        }
    });
    for (int i = 0; i < points_per_dim; ++i)
        if (bests[i] < best) {
            best = bests[i];
            best_alpha = best_alphas[i];
        }
    return {best_alpha, best};
}

}  // namespace grnea::bench
