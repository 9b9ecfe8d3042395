#pragma once

#include <Eigen/Dense>

#include "grnea/core/tensor.hpp"

namespace grnea::nn {

/// Fully connected layer over flattened batch items. Input (n, c, h, w) is
/// read as n vectors of length c*h*w; output is (n, out_features, 1, 1).
template <typename T>
class Linear {
public:
    Linear() = default;
    Linear(int in_features, int out_features)
        : in_f_(in_features), out_f_(out_features),
          weight(static_cast<std::size_t>(out_features) * in_features, T(0)),
          bias(out_features, T(0)) {}

    int in_features() const { return in_f_; }
    int out_features() const { return out_f_; }

    Tensor4<T> forward(const Tensor4<T>& x, bool cache = true) {
        Tensor4<T> out = infer(x);
        if (cache) x_ = x;
        return out;
    }

    /// Pure forward pass; safe for concurrent callers.
    Tensor4<T> infer(const Tensor4<T>& x) const {
        if (static_cast<int>(x.item_size()) != in_f_)
            throw std::invalid_argument("linear: expected " + std::to_string(in_f_) +
                                        " features, got " + std::to_string(x.item_size()));
        Tensor4<T> out(x.n(), out_f_, 1, 1);
        using MatCM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
        Eigen::Map<const MatCM> xm(x.data(), in_f_, x.n());
        Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> wm(
            weight.data(), out_f_, in_f_);
        Eigen::Map<MatCM> om(out.data(), out_f_, x.n());
        om.noalias() = wm * xm;
        om.colwise() += Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>(bias.data(), out_f_);
        return out;
    }

    Tensor4<T> backward(const Tensor4<T>& dout) {
        ensure_grad_buffers();
        using MatCM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
        using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        Eigen::Map<const MatCM> dm(dout.data(), out_f_, x_.n());
        Eigen::Map<const MatCM> xm(x_.data(), in_f_, x_.n());
        Eigen::Map<MatRM> dwm(weight_grad.data(), out_f_, in_f_);
        dwm.noalias() += dm * xm.transpose();
        // fixed-order reduction; vectorized sums vary with buffer alignment
        for (int n = 0; n < x_.n(); ++n)
            for (int o = 0; o < out_f_; ++o)
                bias_grad[o] += dout.data()[static_cast<std::size_t>(n) * out_f_ + o];

        Tensor4<T> dx(x_.n(), x_.c(), x_.h(), x_.w());
        Eigen::Map<const MatRM> wm(weight.data(), out_f_, in_f_);
        Eigen::Map<MatCM> dxm(dx.data(), in_f_, x_.n());
        dxm.noalias() = wm.transpose() * dm;
        return dx;
    }

    void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) {
        ensure_grad_buffers();
        out.push_back({prefix + ".weight", weight.data(), weight_grad.data(), weight.size()});
        out.push_back({prefix + ".bias", bias.data(), bias_grad.data(), bias.size()});
    }

    std::vector<T> weight, bias, weight_grad, bias_grad;

private:
    void ensure_grad_buffers() {
        if (weight_grad.size() != weight.size()) weight_grad.assign(weight.size(), T(0));
        if (bias_grad.size() != bias.size()) bias_grad.assign(bias.size(), T(0));
    }

    int in_f_ = 0, out_f_ = 0;
    Tensor4<T> x_;
};

}  // namespace grnea::nn
