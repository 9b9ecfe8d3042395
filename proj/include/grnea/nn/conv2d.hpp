#pragma once

#include <Eigen/Dense>

#include "grnea/core/tensor.hpp"
#include "grnea/core/threading.hpp"

namespace grnea::nn {

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapRM = Eigen::Map<MatRM<T>>;
template <typename T>
using CMapRM = Eigen::Map<const MatRM<T>>;

/// 2-D convolution weights with SAME padding. Output spatial size is
/// ceil(input / stride); total padding max((out-1)*stride + k - in, 0),
/// split floor-half before / rest after.
template <typename T>
struct ConvParams {
    int c_in = 0, c_out = 0, kh = 0, kw = 0, stride = 1;
    std::vector<T> weight;  // (c_out, c_in, kh, kw) row-major
    std::vector<T> bias;    // (c_out)

    ConvParams() = default;
    ConvParams(int c_in_, int c_out_, int k, int stride_)
        : c_in(c_in_), c_out(c_out_), kh(k), kw(k), stride(stride_),
          weight(static_cast<std::size_t>(c_out_) * c_in_ * k * k, T(0)), bias(c_out_, T(0)) {
        if (stride_ != 1 && stride_ != 2)
            throw std::invalid_argument("ConvParams: stride must be 1 or 2");
    }
};

inline int same_out(int in, int stride) { return (in + stride - 1) / stride; }

namespace detail {

inline void same_pad(int in, int k, int stride, int& pad_before) {
    int out = same_out(in, stride);
    int total = std::max(0, (out - 1) * stride + k - in);
    pad_before = total / 2;
}

/// Unfold one item into a (c_in*kh*kw, out_h*out_w) row-major patch matrix.
template <typename T>
void im2col(const T* x, int c_in, int h, int w, int kh, int kw, int stride, int out_h, int out_w,
            T* col) {
    int pad_y = 0, pad_x = 0;
    same_pad(h, kh, stride, pad_y);
    same_pad(w, kw, stride, pad_x);
    const std::size_t ohw = static_cast<std::size_t>(out_h) * out_w;
    for (int ci = 0; ci < c_in; ++ci) {
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx) {
                T* row = col + ((static_cast<std::size_t>(ci) * kh + ky) * kw + kx) * ohw;
                for (int oy = 0; oy < out_h; ++oy) {
                    const int iy = oy * stride - pad_y + ky;
                    if (iy < 0 || iy >= h) {
                        std::fill(row + static_cast<std::size_t>(oy) * out_w,
                                  row + static_cast<std::size_t>(oy + 1) * out_w, T(0));
                        continue;
                    }
                    const T* src = x + (static_cast<std::size_t>(ci) * h + iy) * w;
                    T* dst = row + static_cast<std::size_t>(oy) * out_w;
                    for (int ox = 0; ox < out_w; ++ox) {
                        const int ix = ox * stride - pad_x + kx;
                        dst[ox] = (ix >= 0 && ix < w) ? src[ix] : T(0);
                    }
                }
            }
        }
    }
}

/// Scatter-add of a patch-matrix gradient back onto the input gradient.
template <typename T>
void col2im(const T* col, int c_in, int h, int w, int kh, int kw, int stride, int out_h, int out_w,
            T* dx) {
    int pad_y = 0, pad_x = 0;
    same_pad(h, kh, stride, pad_y);
    same_pad(w, kw, stride, pad_x);
    const std::size_t ohw = static_cast<std::size_t>(out_h) * out_w;
    for (int ci = 0; ci < c_in; ++ci) {
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx) {
                const T* row = col + ((static_cast<std::size_t>(ci) * kh + ky) * kw + kx) * ohw;
                for (int oy = 0; oy < out_h; ++oy) {
                    const int iy = oy * stride - pad_y + ky;
                    if (iy < 0 || iy >= h) continue;
                    T* dst = dx + (static_cast<std::size_t>(ci) * h + iy) * w;
                    const T* src = row + static_cast<std::size_t>(oy) * out_w;
                    for (int ox = 0; ox < out_w; ++ox) {
                        const int ix = ox * stride - pad_x + kx;
                        if (ix >= 0 && ix < w) dst[ix] += src[ox];
                    }
                }
            }
        }
    }
}

}  // namespace detail

/// Trainable convolution layer. Forward caches the unfolded input per batch
/// item; backward accumulates weight/bias gradients item by item in batch
/// order so results do not depend on the worker count.
template <typename T>
class Conv2d {
public:
    Conv2d() = default;
    Conv2d(int c_in, int c_out, int k, int stride) : p_(c_in, c_out, k, stride) {}
    explicit Conv2d(ConvParams<T> p) : p_(std::move(p)) {}

    ConvParams<T>& params() { return p_; }
    const ConvParams<T>& params() const { return p_; }

    Tensor4<T> forward(const Tensor4<T>& x, bool cache = true) {
        Tensor4<T> out = run_forward(x, col_);
        in_shape_ = {x.n(), x.c(), x.h(), x.w()};
        if (!cache) col_.clear();
        return out;
    }

    /// Pure forward pass; safe for concurrent callers on a trained layer.
    Tensor4<T> infer(const Tensor4<T>& x) const {
        std::vector<T> col;
        return run_forward(x, col);
    }

    /// Returns d/d(input); adds into weight_grad/bias_grad.
    Tensor4<T> backward(const Tensor4<T>& dout) {
        const auto [n, c, h, w] = in_shape_;
        const int out_h = dout.h(), out_w = dout.w();
        const int ckk = p_.c_in * p_.kh * p_.kw;
        const std::size_t ohw = static_cast<std::size_t>(out_h) * out_w;
        Tensor4<T> dx(n, c, h, w);
        ensure_grad_buffers();

        std::vector<T> dw_items(static_cast<std::size_t>(n) * p_.c_out * ckk);
        std::vector<T> dcol(static_cast<std::size_t>(n) * ckk * ohw);
        parallel_for(n, [&](std::size_t i) {
            CMapRM<T> dom(dout.item(static_cast<int>(i)), p_.c_out,
                          static_cast<Eigen::Index>(ohw));
            CMapRM<T> cm(col_.data() + i * ckk * ohw, ckk, static_cast<Eigen::Index>(ohw));
            MapRM<T> dwm(dw_items.data() + i * p_.c_out * ckk, p_.c_out, ckk);
            dwm.noalias() = dom * cm.transpose();
            CMapRM<T> wm(p_.weight.data(), p_.c_out, ckk);
            MapRM<T> dcm(dcol.data() + i * ckk * ohw, ckk, static_cast<Eigen::Index>(ohw));
            dcm.noalias() = wm.transpose() * dom;
            detail::col2im(dcol.data() + i * ckk * ohw, p_.c_in, h, w, p_.kh, p_.kw, p_.stride,
                           out_h, out_w, dx.item(static_cast<int>(i)));
        });
        // fixed-order reductions
        for (int i = 0; i < n; ++i) {
            const T* dw = dw_items.data() + static_cast<std::size_t>(i) * p_.c_out * ckk;
            for (std::size_t k = 0; k < weight_grad.size(); ++k) weight_grad[k] += dw[k];
            const T* d = dout.item(i);
            for (int co = 0; co < p_.c_out; ++co) {
                T s = T(0);
                const T* dd = d + co * ohw;
                for (std::size_t k = 0; k < ohw; ++k) s += dd[k];
                bias_grad[co] += s;
            }
        }
        return dx;
    }

    void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) {
        ensure_grad_buffers();
        out.push_back({prefix + ".weight", p_.weight.data(), weight_grad.data(), p_.weight.size()});
        out.push_back({prefix + ".bias", p_.bias.data(), bias_grad.data(), p_.bias.size()});
    }

    std::vector<T> weight_grad, bias_grad;

private:
    Tensor4<T> run_forward(const Tensor4<T>& x, std::vector<T>& col_buf) const {
        if (x.c() != p_.c_in)
            throw std::invalid_argument("conv2d: input has " + std::to_string(x.c()) +
                                        " channels, expected " + std::to_string(p_.c_in));
        check_finite(x, "conv2d");
        const int out_h = same_out(x.h(), p_.stride);
        const int out_w = same_out(x.w(), p_.stride);
        const int ckk = p_.c_in * p_.kh * p_.kw;
        const std::size_t ohw = static_cast<std::size_t>(out_h) * out_w;
        Tensor4<T> out(x.n(), p_.c_out, out_h, out_w);
        col_buf.resize(static_cast<std::size_t>(x.n()) * ckk * ohw);

        Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> bias(p_.bias.data(), p_.c_out);
        parallel_for(x.n(), [&](std::size_t n) {
            T* col = col_buf.data() + n * ckk * ohw;
            detail::im2col(x.item(static_cast<int>(n)), p_.c_in, x.h(), x.w(), p_.kh, p_.kw,
                           p_.stride, out_h, out_w, col);
            CMapRM<T> wm(p_.weight.data(), p_.c_out, ckk);
            CMapRM<T> cm(col, ckk, static_cast<Eigen::Index>(ohw));
            MapRM<T> om(out.item(static_cast<int>(n)), p_.c_out, static_cast<Eigen::Index>(ohw));
            om.noalias() = wm * cm;
            om.colwise() += bias;
        });
        return out;
    }

    void ensure_grad_buffers() {
        if (weight_grad.size() != p_.weight.size()) weight_grad.assign(p_.weight.size(), T(0));
        if (bias_grad.size() != p_.bias.size()) bias_grad.assign(p_.bias.size(), T(0));
    }

    ConvParams<T> p_;
    std::array<int, 4> in_shape_{};
    std::vector<T> col_;
};

/// Stateless convolution, the op-level entry point.
template <typename T>
Tensor4<T> conv2d(const Tensor4<T>& input, const ConvParams<T>& params) {
    Conv2d<T> layer(params);
    return layer.forward(input, /*cache=*/false);
}

}  // namespace grnea::nn
