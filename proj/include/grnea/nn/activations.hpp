#pragma once

#include <cmath>

#include "grnea/core/tensor.hpp"
#include "grnea/core/threading.hpp"

namespace grnea::nn {

template <typename T>
class Relu {
public:
    static Tensor4<T> apply(const Tensor4<T>& x) {
        Tensor4<T> out(x.n(), x.c(), x.h(), x.w());
        const T* v = x.data();
        T* o = out.data();
        for (std::size_t i = 0; i < x.size(); ++i) o[i] = v[i] > T(0) ? v[i] : T(0);
        return out;
    }

    Tensor4<T> forward(const Tensor4<T>& x, bool cache = true) {
        Tensor4<T> out = apply(x);
        if (cache) x_ = x;
        return out;
    }

    Tensor4<T> infer(const Tensor4<T>& x) const { return apply(x); }
    Tensor4<T> backward(const Tensor4<T>& dout) {
        Tensor4<T> dx(x_.n(), x_.c(), x_.h(), x_.w());
        const T* v = x_.data();
        const T* d = dout.data();
        T* o = dx.data();
        for (std::size_t i = 0; i < x_.size(); ++i) o[i] = v[i] > T(0) ? d[i] : T(0);
        return dx;
    }

private:
    Tensor4<T> x_;
};

/// Logistic squashing for the image-valued decoder output.
template <typename T>
class Sigmoid {
public:
    static Tensor4<T> apply(const Tensor4<T>& x) {
        Tensor4<T> out(x.n(), x.c(), x.h(), x.w());
        const T* v = x.data();
        T* o = out.data();
        for (std::size_t i = 0; i < x.size(); ++i) o[i] = T(1) / (T(1) + std::exp(-v[i]));
        return out;
    }

    Tensor4<T> forward(const Tensor4<T>& x, bool cache = true) {
        Tensor4<T> out = apply(x);
        if (cache) y_ = out;
        return out;
    }

    Tensor4<T> infer(const Tensor4<T>& x) const { return apply(x); }
    Tensor4<T> backward(const Tensor4<T>& dout) {
        Tensor4<T> dx(y_.n(), y_.c(), y_.h(), y_.w());
        const T* y = y_.data();
        const T* d = dout.data();
        T* o = dx.data();
        for (std::size_t i = 0; i < y_.size(); ++i) o[i] = d[i] * y[i] * (T(1) - y[i]);
        return dx;
    }

private:
    Tensor4<T> y_;
};

}  // namespace grnea::nn
