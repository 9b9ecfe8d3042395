#pragma once

#include <cmath>

#include "grnea/core/tensor.hpp"
#include "grnea/core/threading.hpp"

namespace grnea::nn {

namespace detail {

struct Axis {
    int i0, i1;
    double w1;  // weight of i1; i0 gets (1 - w1)
};

/// Half-pixel-center source coordinate, clamped to the valid range.
inline Axis axis_map(int dst, int in, int out) {
    double src = (dst + 0.5) * (static_cast<double>(in) / out) - 0.5;
    src = std::min(std::max(src, 0.0), static_cast<double>(in - 1));
    int i0 = static_cast<int>(std::floor(src));
    int i1 = std::min(i0 + 1, in - 1);
    return {i0, i1, src - i0};
}

}  // namespace detail

/// Separable bilinear resampling over 4 bracketing source pixels.
template <typename T>
class BilinearResize {
public:
    BilinearResize() = default;
    BilinearResize(int out_h, int out_w) : out_h_(out_h), out_w_(out_w) {
        if (out_h < 1 || out_w < 1)
            throw std::invalid_argument("bilinear_resize: output size must be >= 1");
    }

    Tensor4<T> forward(const Tensor4<T>& x, bool cache = true) {
        Tensor4<T> out = infer(x);
        if (cache) in_shape_ = {x.n(), x.c(), x.h(), x.w()};
        return out;
    }

    /// Pure forward pass; safe for concurrent callers.
    Tensor4<T> infer(const Tensor4<T>& x) const {
        const int H = x.h(), W = x.w();
        std::vector<detail::Axis> ys(out_h_), xs(out_w_);
        for (int oy = 0; oy < out_h_; ++oy) ys[oy] = detail::axis_map(oy, H, out_h_);
        for (int ox = 0; ox < out_w_; ++ox) xs[ox] = detail::axis_map(ox, W, out_w_);
        Tensor4<T> out(x.n(), x.c(), out_h_, out_w_);
        const std::size_t planes = static_cast<std::size_t>(x.n()) * x.c();
        parallel_for(planes, [&](std::size_t p) {
            const T* src = x.data() + p * H * W;
            T* dst = out.data() + p * static_cast<std::size_t>(out_h_) * out_w_;
            for (int oy = 0; oy < out_h_; ++oy) {
                const auto& ay = ys[oy];
                const T* r0 = src + static_cast<std::size_t>(ay.i0) * W;
                const T* r1 = src + static_cast<std::size_t>(ay.i1) * W;
                const T wy = static_cast<T>(ay.w1);
                for (int ox = 0; ox < out_w_; ++ox) {
                    const auto& ax = xs[ox];
                    const T wx = static_cast<T>(ax.w1);
                    const T top = r0[ax.i0] * (T(1) - wx) + r0[ax.i1] * wx;
                    const T bot = r1[ax.i0] * (T(1) - wx) + r1[ax.i1] * wx;
                    dst[static_cast<std::size_t>(oy) * out_w_ + ox] =
                        top * (T(1) - wy) + bot * wy;
                }
            }
        });
        return out;
    }

    Tensor4<T> backward(const Tensor4<T>& dout) {
        const auto [n, c, H, W] = in_shape_;
        std::vector<detail::Axis> ys(out_h_), xs(out_w_);
        for (int oy = 0; oy < out_h_; ++oy) ys[oy] = detail::axis_map(oy, H, out_h_);
        for (int ox = 0; ox < out_w_; ++ox) xs[ox] = detail::axis_map(ox, W, out_w_);
        Tensor4<T> dx(n, c, H, W);
        const std::size_t planes = static_cast<std::size_t>(n) * c;
        parallel_for(planes, [&](std::size_t p) {
            const T* d = dout.data() + p * static_cast<std::size_t>(out_h_) * out_w_;
            T* g = dx.data() + p * H * W;
            for (int oy = 0; oy < out_h_; ++oy) {
                const auto& ay = ys[oy];
                const T wy = static_cast<T>(ay.w1);
                for (int ox = 0; ox < out_w_; ++ox) {
                    const auto& ax = xs[ox];
                    const T wx = static_cast<T>(ax.w1);
                    const T dv = d[static_cast<std::size_t>(oy) * out_w_ + ox];
                    g[static_cast<std::size_t>(ay.i0) * W + ax.i0] += dv * (T(1) - wy) * (T(1) - wx);
                    g[static_cast<std::size_t>(ay.i0) * W + ax.i1] += dv * (T(1) - wy) * wx;
                    g[static_cast<std::size_t>(ay.i1) * W + ax.i0] += dv * wy * (T(1) - wx);
                    g[static_cast<std::size_t>(ay.i1) * W + ax.i1] += dv * wy * wx;
                }
            }
        });
        return dx;
    }

private:
    int out_h_ = 0, out_w_ = 0;
    std::array<int, 4> in_shape_{};
};

/// Op-level entry point.
template <typename T>
Tensor4<T> bilinear_resize(const Tensor4<T>& input, int out_h, int out_w) {
    BilinearResize<T> layer(out_h, out_w);
    return layer.forward(input, /*cache=*/false);
}

}  // namespace grnea::nn
