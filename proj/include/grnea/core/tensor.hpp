#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace grnea {

/// Rank-4 array in (batch, channel, height, width) layout, row-major with
/// batch outermost. Optionally carries a same-shape gradient buffer.
template <typename T>
class Tensor4 {
public:
    Tensor4() = default;

    Tensor4(int n, int c, int h, int w)
        : n_(n), c_(c), h_(h), w_(w), data_(static_cast<std::size_t>(n) * c * h * w, T(0)) {
        if (n <= 0 || c <= 0 || h <= 0 || w <= 0)
            throw std::invalid_argument("Tensor4: shape components must be positive, got (" +
                                        std::to_string(n) + "," + std::to_string(c) + "," +
                                        std::to_string(h) + "," + std::to_string(w) + ")");
    }

    Tensor4(int n, int c, int h, int w, std::vector<T> values)
        : n_(n), c_(c), h_(h), w_(w), data_(std::move(values)) {
        if (data_.size() != static_cast<std::size_t>(n) * c * h * w)
            throw std::invalid_argument("Tensor4: value count does not match shape");
    }

    /// Same data viewed under a new shape with equal element count.
    Tensor4 reshaped(int n, int c, int h, int w) && {
        return Tensor4(n, c, h, w, std::move(data_));
    }

    int n() const { return n_; }
    int c() const { return c_; }
    int h() const { return h_; }
    int w() const { return w_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& values() { return data_; }
    const std::vector<T>& values() const { return data_; }

    std::size_t index(int n, int c, int y, int x) const {
        return ((static_cast<std::size_t>(n) * c_ + c) * h_ + y) * w_ + x;
    }
    T& at(int n, int c, int y, int x) { return data_[index(n, c, y, x)]; }
    const T& at(int n, int c, int y, int x) const { return data_[index(n, c, y, x)]; }

    /// Contiguous slice for one batch item (c*h*w elements).
    T* item(int n) { return data_.data() + static_cast<std::size_t>(n) * c_ * h_ * w_; }
    const T* item(int n) const { return data_.data() + static_cast<std::size_t>(n) * c_ * h_ * w_; }
    std::size_t item_size() const { return static_cast<std::size_t>(c_) * h_ * w_; }

    bool same_shape(const Tensor4& o) const {
        return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
    }
    std::string shape_str() const {
        return "(" + std::to_string(n_) + "," + std::to_string(c_) + "," + std::to_string(h_) +
               "," + std::to_string(w_) + ")";
    }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    bool all_finite() const {
        for (const T& v : data_)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    /// Gradient buffer, allocated lazily; always shape-matched to the values.
    bool has_grad() const { return !grad_.empty(); }
    std::vector<T>& grad() {
        if (grad_.empty()) grad_.assign(data_.size(), T(0));
        return grad_;
    }
    const std::vector<T>& grad() const { return grad_; }
    void zero_grad() {
        if (!grad_.empty()) std::fill(grad_.begin(), grad_.end(), T(0));
    }

private:
    int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
    std::vector<T> data_;
    std::vector<T> grad_;
};

template <typename T>
void check_same_shape(const Tensor4<T>& a, const Tensor4<T>& b, const char* what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + a.shape_str() +
                                    " vs " + b.shape_str());
}

template <typename T>
void check_finite(const Tensor4<T>& t, const char* what) {
    if (!t.all_finite())
        throw std::invalid_argument(std::string(what) + ": non-finite values in input");
}

/// Named view over one parameter array and its gradient accumulator.
/// Layers register their parameters through this so that optimizers,
/// checkpoints and gradient tests can walk a model generically.
template <typename T>
struct ParamRef {
    std::string name;
    T* value = nullptr;
    T* grad = nullptr;
    std::size_t count = 0;
};

}  // namespace grnea
