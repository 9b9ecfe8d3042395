#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "grnea/core/tensor.hpp"

namespace grnea {

/// RGB raster with pixel intensities in [0, 1], HWC layout. The unit of
/// exchange between simulators, the VAEs, the filter and the metrics.
struct Image {
    int h = 0, w = 0;
    std::vector<float> px;  // h * w * 3

    Image() = default;
    Image(int h_, int w_) : h(h_), w(w_), px(static_cast<std::size_t>(h_) * w_ * 3, 0.0f) {
        if (h_ <= 0 || w_ <= 0) throw std::invalid_argument("Image: size must be positive");
    }

    float& at(int y, int x, int c) { return px[(static_cast<std::size_t>(y) * w + x) * 3 + c]; }
    float at(int y, int x, int c) const {
        return px[(static_cast<std::size_t>(y) * w + x) * 3 + c];
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(h) * w; }

    void fill(float r, float g, float b) {
        for (std::size_t i = 0; i < pixel_count(); ++i) {
            px[3 * i] = r;
            px[3 * i + 1] = g;
            px[3 * i + 2] = b;
        }
    }
};

/// HWC [0,1] image -> (1, 3, h, w) tensor.
template <typename T>
Tensor4<T> image_to_tensor(const Image& img) {
    Tensor4<T> t(1, 3, img.h, img.w);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int c = 0; c < 3; ++c) t.at(0, c, y, x) = static_cast<T>(img.at(y, x, c));
    return t;
}

/// Copy batch item n of a (N, 3, h, w) tensor into an image.
template <typename T>
Image tensor_to_image(const Tensor4<T>& t, int n = 0) {
    if (t.c() != 3) throw std::invalid_argument("tensor_to_image: expected 3 channels");
    Image img(t.h(), t.w());
    for (int y = 0; y < t.h(); ++y)
        for (int x = 0; x < t.w(); ++x)
            for (int c = 0; c < 3; ++c) img.at(y, x, c) = static_cast<float>(t.at(n, c, y, x));
    return img;
}

/// Pack a set of images into one (N, 3, h, w) batch tensor.
template <typename T>
Tensor4<T> images_to_batch(const std::vector<Image>& imgs, const std::vector<int>& indices) {
    if (indices.empty()) throw std::invalid_argument("images_to_batch: empty batch");
    const Image& first = imgs.at(indices[0]);
    Tensor4<T> t(static_cast<int>(indices.size()), 3, first.h, first.w);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const Image& img = imgs.at(indices[i]);
        if (img.h != first.h || img.w != first.w)
            throw std::invalid_argument("images_to_batch: inconsistent image sizes");
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x)
                for (int c = 0; c < 3; ++c)
                    t.at(static_cast<int>(i), c, y, x) = static_cast<T>(img.at(y, x, c));
    }
    return t;
}

}  // namespace grnea
