#pragma once

#include <array>
#include <cmath>

#include "grnea/bench/fld.hpp"
#include "grnea/bench/lhs.hpp"
#include "grnea/core/image.hpp"
#include "grnea/core/threading.hpp"

namespace grnea::bench {

/// Analytic sheet-forming stand-in. Five process parameters drive a smooth
/// trigonometric strain surface over the blank; the objective is the
/// constrained green percentage of its forming-limit evaluation. The design
/// point (punch friction at minimum, the rest mid-range) stretches gently
/// enough that no node crosses the limit curve, which pins a known feasible
/// region.
struct StrainBenchmark {
    double hardening_n = 0.2116;
    double thickness_t = 0.8;
    int grid = 32;  // nodes per side

    // parameter order: punch/die friction, binder friction,
    // drawing speed (mm/s), blank holder force (Ton), drawbead resistance (N/mm)
    Bounds bounds() const {
        Bounds b;
        b.lower = {0.08, 0.08, 1000.0, 50.0, 50.0};
        b.upper = {0.20, 0.20, 5000.0, 150.0, 150.0};
        return b;
    }

    std::vector<double> midpoint() const {
        const Bounds b = bounds();
        std::vector<double> m(b.dims());
        for (int d = 0; d < b.dims(); ++d) m[d] = 0.5 * (b.lower[d] + b.upper[d]);
        return m;
    }

    /// All-parameters-at-lower-bound design; red-free by construction.
    std::vector<double> feasible_reference() const { return bounds().lower; }

    std::array<double, 5> normalized(const std::vector<double>& alpha) const {
        const Bounds b = bounds();
        if (static_cast<int>(alpha.size()) != 5)
            throw std::invalid_argument("strain benchmark: expected 5 parameters");
        std::array<double, 5> u{};
        for (int d = 0; d < 5; ++d) {
            if (alpha[d] < b.lower[d] - 1e-9 || alpha[d] > b.upper[d] + 1e-9)
                throw std::invalid_argument("strain benchmark: parameter out of bounds");
            u[d] = (alpha[d] - b.lower[d]) / (b.upper[d] - b.lower[d]);
        }
        return u;
    }

    StrainField strain_field(const std::vector<double>& alpha) const {
        const auto u = normalized(alpha);
        StrainField s;
        s.hardening_n = hardening_n;
        s.thickness_t = thickness_t;
        s.nodes.resize(static_cast<std::size_t>(grid) * grid);
        const double stretch = 0.2 + 0.5 * u[0];        // punch friction drives severity
        const double spread = 0.22 * (0.4 + 0.6 * u[1]);  // binder friction widens minor strain
        for (int i = 0; i < grid; ++i) {
            const double y = (i + 0.5) / grid;
            for (int j = 0; j < grid; ++j) {
                const double x = (j + 0.5) / grid;
                const double dome = std::sin(M_PI * x) * std::sin(M_PI * y);
                double e2 = spread * (dome - 0.35) +
                            0.03 * (u[2] - 0.5) * std::sin(2.0 * M_PI * x) * std::sin(M_PI * y);
                double g = stretch * (0.12 + 0.55 * dome * dome) *
                               (1.0 + 0.2 * (u[3] - 0.5) * std::cos(M_PI * x)) +
                           0.05 * u[4] * (1.0 - dome);
                s.nodes[static_cast<std::size_t>(i) * grid + j] = {e2 + g, e2};
            }
        }
        return s;
    }
};

inline double strain_true_objective(const StrainBenchmark& bench,
                                    const std::vector<double>& alpha) {
    return constrained_objective(fld_evaluate(bench.strain_field(alpha)));
}

/// FLD scatter raster: green/red/wrinkle node classes on a white background.
inline Image strain_render(const StrainBenchmark& bench, const std::vector<double>& alpha,
                           int resolution) {
    const StrainField s = bench.strain_field(alpha);
    const FldResult r = fld_evaluate(s);
    Image img(resolution, resolution);
    img.fill(1.0f, 1.0f, 1.0f);
    const int margin = std::max(1, resolution / 16);
    const int inner = resolution - 2 * margin;
    for (int ry = 0; ry < inner; ++ry) {
        const int gy = ry * bench.grid / inner;
        for (int rx = 0; rx < inner; ++rx) {
            const int gx = rx * bench.grid / inner;
            const std::size_t node = static_cast<std::size_t>(gy) * bench.grid + gx;
            float cr, cg, cb;
            if (r.p[node] > 0.0) {
                cr = 0.85f; cg = 0.0f; cb = 0.0f;  // crack risk
            } else if (r.q[node] > 0.0) {
                cr = 0.25f; cg = 0.25f; cb = 0.95f;  // wrinkling
            } else {
                cr = 0.0f; cg = 0.7f; cb = 0.1f;  // safe
            }
            img.at(margin + ry, margin + rx, 0) = cr;
            img.at(margin + ry, margin + rx, 1) = cg;
            img.at(margin + ry, margin + rx, 2) = cb;
        }
    }
    return img;
}

/// Dense-grid reference optimum over the full 5-dim box.
inline std::pair<std::vector<double>, double> strain_grid_oracle(const StrainBenchmark& bench,
                                                                 int points_per_dim = 11) {
    const Bounds b = bench.bounds();
    auto coord = [&](int d, int i) {
        return b.lower[d] + (b.upper[d] - b.lower[d]) * static_cast<double>(i) /
                                (points_per_dim - 1);
    };
    std::vector<double> bests(points_per_dim, -1.0);
    std::vector<std::vector<double>> arg(points_per_dim, bench.midpoint());
    parallel_for(points_per_dim, [&](std::size_t i0) {
        std::vector<double> a(5);
        a[0] = coord(0, static_cast<int>(i0));
        for (int i1 = 0; i1 < points_per_dim; ++i1) {
            a[1] = coord(1, i1);
            for (int i2 = 0; i2 < points_per_dim; ++i2) {
                a[2] = coord(2, i2);
                for (int i3 = 0; i3 < points_per_dim; ++i3) {
                    a[3] = coord(3, i3);
                    for (int i4 = 0; i4 < points_per_dim; ++i4) {
                        a[4] = coord(4, i4);
                        const double v = strain_true_objective(bench, a);
                        if (v > bests[i0]) {
                            bests[i0] = v;
                            arg[i0] = a;
                        }
                    }
                }
            }
        }
    });
    double best = -1.0;
    std::vector<double> best_alpha = bench.midpoint();
    for (int i = 0; i < points_per_dim; ++i)
        if (bests[i] > best) {
            best = bests[i];
            best_alpha = arg[i];
        }
    return {best_alpha, best};
}

}  // namespace grnea::bench
