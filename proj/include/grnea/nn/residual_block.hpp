#pragma once

#include "grnea/nn/activations.hpp"
#include "grnea/nn/bilinear.hpp"
#include "grnea/nn/conv2d.hpp"
#include "grnea/nn/switchable_norm.hpp"

namespace grnea::nn {

/// Downsampling residual block: (n, c, h, w) -> (n, 2c, h/2, w/2).
/// Main path 1x1/s1 -> 3x3/s2 -> 1x1/s1, each conv followed by switchable
/// norm, ReLU after the first two; shortcut is a strided 1x1 projection.
/// The block output is main(x) + shortcut(x), no activation after the sum.
template <typename T>
class EncoderBlock {
public:
    EncoderBlock() = default;
    explicit EncoderBlock(int c)
        : conv1(c, c, 1, 1), sn1(c), conv2(c, c, 3, 2), sn2(c), conv3(c, 2 * c, 1, 1),
          sn3(2 * c), shortcut(c, 2 * c, 1, 2) {}

    Tensor4<T> forward(const Tensor4<T>& x, bool cache = true) {
        if (x.h() % 2 != 0 || x.w() % 2 != 0)
            throw std::invalid_argument("encoder block: spatial size must be even, got " +
                                        x.shape_str());
        Tensor4<T> h = relu1.forward(sn1.forward(conv1.forward(x, cache), cache), cache);
        h = relu2.forward(sn2.forward(conv2.forward(h, cache), cache), cache);
        h = sn3.forward(conv3.forward(h, cache), cache);
        Tensor4<T> s = shortcut.forward(x, cache);
        T* hv = h.data();
        const T* sv = s.data();
        for (std::size_t i = 0; i < h.size(); ++i) hv[i] += sv[i];
        return h;
    }

    /// Pure forward pass; safe for concurrent callers on a trained block.
    Tensor4<T> infer(const Tensor4<T>& x) const {
        if (x.h() % 2 != 0 || x.w() % 2 != 0)
            throw std::invalid_argument("encoder block: spatial size must be even, got " +
                                        x.shape_str());
        Tensor4<T> h = relu1.infer(sn1.infer(conv1.infer(x)));
        h = relu2.infer(sn2.infer(conv2.infer(h)));
        h = sn3.infer(conv3.infer(h));
        Tensor4<T> s = shortcut.infer(x);
        T* hv = h.data();
        const T* sv = s.data();
        for (std::size_t i = 0; i < h.size(); ++i) hv[i] += sv[i];
        return h;
    }

    Tensor4<T> backward(const Tensor4<T>& dout) {
        Tensor4<T> dm = conv1.backward(sn1.backward(relu1.backward(
            conv2.backward(sn2.backward(relu2.backward(conv3.backward(sn3.backward(dout))))))));
        Tensor4<T> ds = shortcut.backward(dout);
        T* dv = dm.data();
        const T* sv = ds.data();
        for (std::size_t i = 0; i < dm.size(); ++i) dv[i] += sv[i];
        return dm;
    }

    void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) {
        conv1.collect_params(prefix + ".conv1", out);
        sn1.collect_params(prefix + ".sn1", out);
        conv2.collect_params(prefix + ".conv2", out);
        sn2.collect_params(prefix + ".sn2", out);
        conv3.collect_params(prefix + ".conv3", out);
        sn3.collect_params(prefix + ".sn3", out);
        shortcut.collect_params(prefix + ".shortcut", out);
    }

    Conv2d<T> conv1, conv2, conv3, shortcut;
    SwitchableNorm<T> sn1, sn2, sn3;
    Relu<T> relu1, relu2;
};

/// Upsampling residual block: (n, c, h, w) -> (n, c/2, 2h, 2w).
/// Mirror of the encoder block with the stride-2 conv replaced by a bilinear
/// x2 upsample placed before the final projection; shortcut is bilinear x2
/// followed by a 1x1 projection.
template <typename T>
class DecoderBlock {
public:
    DecoderBlock() = default;
    explicit DecoderBlock(int c)
        : conv1(c, c, 1, 1), sn1(c), conv2(c, c, 3, 1), sn2(c), conv3(c, c / 2, 1, 1),
          sn3(c / 2), shortcut(c, c / 2, 1, 1) {
        if (c % 2 != 0) throw std::invalid_argument("decoder block: channel count must be even");
    }

    Tensor4<T> forward(const Tensor4<T>& x, bool cache = true) {
        up_main = BilinearResize<T>(2 * x.h(), 2 * x.w());
        up_short = BilinearResize<T>(2 * x.h(), 2 * x.w());
        Tensor4<T> h = relu1.forward(sn1.forward(conv1.forward(x, cache), cache), cache);
        h = relu2.forward(sn2.forward(conv2.forward(h, cache), cache), cache);
        h = up_main.forward(h, cache);
        h = sn3.forward(conv3.forward(h, cache), cache);
        Tensor4<T> s = shortcut.forward(up_short.forward(x, cache), cache);
        T* hv = h.data();
        const T* sv = s.data();
        for (std::size_t i = 0; i < h.size(); ++i) hv[i] += sv[i];
        return h;
    }

    /// Pure forward pass; safe for concurrent callers on a trained block.
    Tensor4<T> infer(const Tensor4<T>& x) const {
        BilinearResize<T> up(2 * x.h(), 2 * x.w());
        Tensor4<T> h = relu1.infer(sn1.infer(conv1.infer(x)));
        h = relu2.infer(sn2.infer(conv2.infer(h)));
        h = sn3.infer(conv3.infer(up.infer(h)));
        Tensor4<T> s = shortcut.infer(up.infer(x));
        T* hv = h.data();
        const T* sv = s.data();
        for (std::size_t i = 0; i < h.size(); ++i) hv[i] += sv[i];
        return h;
    }

    Tensor4<T> backward(const Tensor4<T>& dout) {
        Tensor4<T> dm = conv1.backward(sn1.backward(relu1.backward(conv2.backward(
            sn2.backward(relu2.backward(up_main.backward(conv3.backward(sn3.backward(dout)))))))));
        Tensor4<T> ds = up_short.backward(shortcut.backward(dout));
        T* dv = dm.data();
        const T* sv = ds.data();
        for (std::size_t i = 0; i < dm.size(); ++i) dv[i] += sv[i];
        return dm;
    }

    void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) {
        conv1.collect_params(prefix + ".conv1", out);
        sn1.collect_params(prefix + ".sn1", out);
        conv2.collect_params(prefix + ".conv2", out);
        sn2.collect_params(prefix + ".sn2", out);
        conv3.collect_params(prefix + ".conv3", out);
        sn3.collect_params(prefix + ".sn3", out);
        shortcut.collect_params(prefix + ".shortcut", out);
    }

    Conv2d<T> conv1, conv2, conv3, shortcut;
    SwitchableNorm<T> sn1, sn2, sn3;
    Relu<T> relu1, relu2;
    BilinearResize<T> up_main, up_short;
};

}  // namespace grnea::nn
