#pragma once

#include <cmath>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "grnea/core/image.hpp"
#include "grnea/core/rng.hpp"
#include "grnea/core/tensor.hpp"
#include "grnea/nn/activations.hpp"
#include "grnea/nn/adam.hpp"
#include "grnea/nn/linear.hpp"
#include "grnea/nn/residual_block.hpp"
#include "grnea/nn/vae_ops.hpp"

namespace grnea {

struct ResVaeConfig {
    int image_size = 64;  // square, 3 channels
    int n_blocks = 4;
    int base_channels = 8;
    int latent_dim = 32;
    double kl_weight = 1e-3;
    int epochs = 60;
    int batch_size = 16;
    double learning_rate = 1e-3;
    std::uint64_t seed = 1;

    void validate() const {
        if (latent_dim < 1) throw std::invalid_argument("resvae: latent_dim must be >= 1");
        if (n_blocks < 1) throw std::invalid_argument("resvae: n_blocks must be >= 1");
        if (base_channels < 1) throw std::invalid_argument("resvae: base_channels must be >= 1");
        const int spatial = image_size >> n_blocks;
        if (spatial < 4 || (spatial << n_blocks) != image_size)
            throw std::invalid_argument(
                "resvae: image_size must be base * 2^n_blocks with base >= 4, got " +
                std::to_string(image_size) + " with " + std::to_string(n_blocks) + " blocks");
        if (kl_weight < 0) throw std::invalid_argument("resvae: kl_weight must be >= 0");
        if (epochs < 1 || batch_size < 1 || learning_rate <= 0)
            throw std::invalid_argument("resvae: invalid training hyperparameters");
    }

    bool operator==(const ResVaeConfig&) const = default;
};

/// Variational auto-encoder over residual blocks with switchable
/// normalization. The encoder halves the spatial size and doubles the depth
/// per block; the decoder mirrors it with bilinear upsampling. Training
/// mutates internal caches; encode/decode/infer paths are const and safe for
/// concurrent callers once training is done.
template <typename T>
class ResVae {
public:
    explicit ResVae(ResVaeConfig cfg) : cfg_(cfg) {
        cfg_.validate();
        stem_conv_ = nn::Conv2d<T>(3, cfg.base_channels, 3, 1);
        stem_sn_ = nn::SwitchableNorm<T>(cfg.base_channels);
        int c = cfg.base_channels;
        enc_.reserve(cfg.n_blocks);
        for (int i = 0; i < cfg.n_blocks; ++i) {
            enc_.emplace_back(c);
            c *= 2;
        }
        top_channels_ = c;
        top_spatial_ = cfg.image_size >> cfg.n_blocks;
        const int feat = top_channels_ * top_spatial_ * top_spatial_;
        mu_head_ = nn::Linear<T>(feat, cfg.latent_dim);
        logvar_head_ = nn::Linear<T>(feat, cfg.latent_dim);
        dec_in_ = nn::Linear<T>(cfg.latent_dim, feat);
        dec_.reserve(cfg.n_blocks);
        for (int i = 0; i < cfg.n_blocks; ++i) {
            dec_.emplace_back(c);
            c /= 2;
        }
        out_conv_ = nn::Conv2d<T>(cfg.base_channels, 3, 3, 1);
    }

    const ResVaeConfig& config() const { return cfg_; }
    std::vector<double> epoch_loss;  // per-epoch mean training loss

    /// He-uniform fan-in init for conv/linear weights; SN stays at defaults.
    void init_weights(Rng& rng) {
        auto he = [&rng](std::vector<T>& w, int fan_in) {
            const double limit = std::sqrt(6.0 / fan_in);
            std::uniform_real_distribution<double> dist(-limit, limit);
            for (T& v : w) v = static_cast<T>(dist(rng));
        };
        auto init_conv = [&](nn::Conv2d<T>& conv) {
            auto& p = conv.params();
            he(p.weight, p.c_in * p.kh * p.kw);
        };
        auto init_linear = [&](nn::Linear<T>& lin) { he(lin.weight, lin.in_features()); };
        init_conv(stem_conv_);
        for (auto& b : enc_) {
            init_conv(b.conv1);
            init_conv(b.conv2);
            init_conv(b.conv3);
            init_conv(b.shortcut);
        }
        init_linear(mu_head_);
        init_linear(logvar_head_);
        init_linear(dec_in_);
        for (auto& b : dec_) {
            init_conv(b.conv1);
            init_conv(b.conv2);
            init_conv(b.conv3);
            init_conv(b.shortcut);
        }
        init_conv(out_conv_);
    }

    std::vector<ParamRef<T>> params() {
        std::vector<ParamRef<T>> out;
        stem_conv_.collect_params("stem.conv", out);
        stem_sn_.collect_params("stem.sn", out);
        for (std::size_t i = 0; i < enc_.size(); ++i)
            enc_[i].collect_params("enc" + std::to_string(i), out);
        mu_head_.collect_params("mu_head", out);
        logvar_head_.collect_params("logvar_head", out);
        dec_in_.collect_params("dec_in", out);
        for (std::size_t i = 0; i < dec_.size(); ++i)
            dec_[i].collect_params("dec" + std::to_string(i), out);
        out_conv_.collect_params("out.conv", out);
        return out;
    }

    struct StepStats {
        T loss, recon_mse, kl;
    };

    void zero_grads() {
        for (auto& p : params())
            for (std::size_t i = 0; i < p.count; ++i) p.grad[i] = T(0);
    }

    /// Loss value only, under a fixed noise draw. Pure given (params, batch, u).
    T loss_only(const Tensor4<T>& batch, const Tensor4<T>& u) const {
        Tensor4<T> mu, lv;
        encode_batch(batch, mu, lv);
        Tensor4<T> z(batch.n(), cfg_.latent_dim, 1, 1);
        for (std::size_t i = 0; i < z.size(); ++i)
            z.data()[i] = mu.data()[i] + std::exp(lv.data()[i] / T(2)) * u.data()[i];
        Tensor4<T> recon = decode_batch(z);
        return nn::mse(recon, batch) + static_cast<T>(cfg_.kl_weight) * batch_kl(mu, lv);
    }

    /// Forward + backward over a batch with a given noise tensor; gradients
    /// accumulate into the parameter registry. No optimizer step.
    StepStats forward_backward(const Tensor4<T>& batch, const Tensor4<T>& u) {
        const int N = batch.n();
        const int dz = cfg_.latent_dim;

        Tensor4<T> t = stem_relu_.forward(stem_sn_.forward(stem_conv_.forward(batch)));
        for (auto& b : enc_) t = b.forward(t);
        Tensor4<T> mu = mu_head_.forward(t);
        Tensor4<T> lv = logvar_head_.forward(t);

        Tensor4<T> z(N, dz, 1, 1);
        for (std::size_t i = 0; i < z.size(); ++i)
            z.data()[i] = mu.data()[i] + std::exp(lv.data()[i] / T(2)) * u.data()[i];

        Tensor4<T> d = dec_in_.forward(z);
        d = std::move(d).reshaped(N, top_channels_, top_spatial_, top_spatial_);
        for (auto& b : dec_) d = b.forward(d);
        Tensor4<T> recon = out_sig_.forward(out_conv_.forward(d));

        const T recon_mse = nn::mse(recon, batch);
        const T kl = batch_kl(mu, lv);
        const T klw = static_cast<T>(cfg_.kl_weight);
        const T loss = recon_mse + klw * kl;
        if (!std::isfinite(static_cast<double>(loss)))
            throw std::runtime_error("resvae: non-finite loss (recon=" +
                                     std::to_string(static_cast<double>(recon_mse)) +
                                     ", kl=" + std::to_string(static_cast<double>(kl)) + ")");

        Tensor4<T> drecon(recon.n(), recon.c(), recon.h(), recon.w());
        const T mse_scale = T(2) / static_cast<T>(recon.size());
        for (std::size_t i = 0; i < recon.size(); ++i)
            drecon.data()[i] = mse_scale * (recon.data()[i] - batch.data()[i]);
        Tensor4<T> dd = out_conv_.backward(out_sig_.backward(drecon));
        for (auto it = dec_.rbegin(); it != dec_.rend(); ++it) dd = it->backward(dd);
        dd = std::move(dd).reshaped(N, top_channels_ * top_spatial_ * top_spatial_, 1, 1);
        Tensor4<T> dzg = dec_in_.backward(dd);

        const T kl_scale = klw / (static_cast<T>(N) * static_cast<T>(dz));
        Tensor4<T> dmu(N, dz, 1, 1), dlv(N, dz, 1, 1);
        for (std::size_t i = 0; i < dmu.size(); ++i) {
            const T sigma = std::exp(lv.data()[i] / T(2));
            dmu.data()[i] = dzg.data()[i] + kl_scale * mu.data()[i];
            dlv.data()[i] = dzg.data()[i] * u.data()[i] * sigma / T(2) +
                            kl_scale * (std::exp(lv.data()[i]) - T(1)) / T(2);
        }
        Tensor4<T> dt = mu_head_.backward(dmu);
        Tensor4<T> dt2 = logvar_head_.backward(dlv);
        for (std::size_t i = 0; i < dt.size(); ++i) dt.data()[i] += dt2.data()[i];
        for (auto it = enc_.rbegin(); it != enc_.rend(); ++it) dt = it->backward(dt);
        stem_conv_.backward(stem_sn_.backward(stem_relu_.backward(dt)));
        return {loss, recon_mse, kl};
    }

    /// One optimization step over a batch: forward, loss, backward, Adam.
    StepStats train_step(const Tensor4<T>& batch, nn::AdamOptimizer<T>& opt, Rng& noise_rng) {
        Tensor4<T> u(batch.n(), cfg_.latent_dim, 1, 1);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t i = 0; i < u.size(); ++i) u.data()[i] = static_cast<T>(normal(noise_rng));
        auto stats = forward_backward(batch, u);
        auto reg = params();
        opt.step(reg);
        return stats;
    }

    // ---- inference (const, thread-safe on a trained model) ----

    void encode_batch(const Tensor4<T>& x, Tensor4<T>& mu, Tensor4<T>& lv) const {
        if (x.c() != 3 || x.h() != cfg_.image_size || x.w() != cfg_.image_size)
            throw std::invalid_argument("resvae encode: image shape " + x.shape_str() +
                                        " does not match configured size " +
                                        std::to_string(cfg_.image_size) +
                                        " (resize before encoding)");
        Tensor4<T> t = stem_relu_.infer(stem_sn_.infer(stem_conv_.infer(x)));
        for (const auto& b : enc_) t = b.infer(t);
        mu = mu_head_.infer(t);
        lv = logvar_head_.infer(t);
    }

    Tensor4<T> decode_batch(const Tensor4<T>& z) const {
        if (static_cast<int>(z.item_size()) != cfg_.latent_dim)
            throw std::invalid_argument("resvae decode: latent length " +
                                        std::to_string(z.item_size()) + " != " +
                                        std::to_string(cfg_.latent_dim));
        Tensor4<T> d = dec_in_.infer(z);
        d = std::move(d).reshaped(z.n(), top_channels_, top_spatial_, top_spatial_);
        for (const auto& b : dec_) d = b.infer(d);
        return nn::Sigmoid<T>::apply(out_conv_.infer(d));
    }

    nn::GaussianLatent<T> encode(const Image& img) const {
        Tensor4<T> x = image_to_tensor<T>(img);
        Tensor4<T> mu, lv;
        encode_batch(x, mu, lv);
        nn::GaussianLatent<T> g;
        g.mu.assign(mu.data(), mu.data() + mu.size());
        g.log_var.assign(lv.data(), lv.data() + lv.size());
        return g;
    }

    Image decode(const std::vector<T>& z) const {
        if (static_cast<int>(z.size()) != cfg_.latent_dim)
            throw std::invalid_argument("resvae decode: latent length mismatch");
        Tensor4<T> zt(1, cfg_.latent_dim, 1, 1, std::vector<T>(z));
        return tensor_to_image(decode_batch(zt));
    }

    /// Reconstruction through the posterior mean (no sampling).
    Image reconstruct(const Image& img) const { return decode(encode(img).mu); }

    /// Smallest |v| over every tensor feeding a ReLU in one pass. Gradient
    /// tests redraw configurations whose value sits under the finite-
    /// difference step, where central differences straddle the kink.
    T min_relu_input(const Tensor4<T>& batch, const Tensor4<T>& u) const {
        T m = std::numeric_limits<T>::max();
        auto scan = [&m](const Tensor4<T>& t) {
            for (auto v : t.values()) m = std::min(m, std::abs(v));
        };
        Tensor4<T> t = stem_sn_.infer(stem_conv_.infer(batch));
        scan(t);
        t = nn::Relu<T>::apply(t);
        for (const auto& b : enc_) {
            Tensor4<T> h = b.sn1.infer(b.conv1.infer(t));
            scan(h);
            h = b.sn2.infer(b.conv2.infer(nn::Relu<T>::apply(h)));
            scan(h);
            t = b.infer(t);
        }
        Tensor4<T> mu = mu_head_.infer(t);
        Tensor4<T> lv = logvar_head_.infer(t);
        Tensor4<T> z(batch.n(), cfg_.latent_dim, 1, 1);
        for (std::size_t i = 0; i < z.size(); ++i)
            z.data()[i] = mu.data()[i] + std::exp(lv.data()[i] / T(2)) * u.data()[i];
        Tensor4<T> d = dec_in_.infer(z);
        d = std::move(d).reshaped(batch.n(), top_channels_, top_spatial_, top_spatial_);
        for (const auto& b : dec_) {
            Tensor4<T> h = b.sn1.infer(b.conv1.infer(d));
            scan(h);
            h = b.sn2.infer(b.conv2.infer(nn::Relu<T>::apply(h)));
            scan(h);
            d = b.infer(d);
        }
        return m;
    }

private:
    /// Mean over batch items of the per-dimension-averaged KL divergence.
    T batch_kl(const Tensor4<T>& mu, const Tensor4<T>& lv) const {
        T kl = T(0);
        for (std::size_t i = 0; i < mu.size(); ++i) {
            const T m = mu.data()[i], l = lv.data()[i];
            kl += T(1) + l - m * m - std::exp(l);
        }
        return -kl / (T(2) * static_cast<T>(mu.size()));
    }

    ResVaeConfig cfg_;
    int top_channels_ = 0, top_spatial_ = 0;

    nn::Conv2d<T> stem_conv_;
    nn::SwitchableNorm<T> stem_sn_;
    nn::Relu<T> stem_relu_;
    std::vector<nn::EncoderBlock<T>> enc_;
    nn::Linear<T> mu_head_, logvar_head_, dec_in_;
    std::vector<nn::DecoderBlock<T>> dec_;
    nn::Conv2d<T> out_conv_;
    nn::Sigmoid<T> out_sig_;
};

/// Full training loop: seeded init, shuffled mini-batches, Adam, per-epoch
/// loss history. Aborts with a diagnostic on a non-finite loss.
template <typename T>
ResVae<T> train_resvae(const ResVaeConfig& cfg, const std::vector<Image>& dataset) {
    cfg.validate();
    if (dataset.empty()) throw std::invalid_argument("resvae train: empty dataset");
    for (const auto& img : dataset)
        if (img.h != cfg.image_size || img.w != cfg.image_size)
            throw std::invalid_argument("resvae train: dataset image size mismatch");

    ResVae<T> model(cfg);
    Rng init_rng = make_rng(cfg.seed, /*tag=*/1);
    model.init_weights(init_rng);
    nn::AdamOptimizer<T> opt(static_cast<T>(cfg.learning_rate));
    Rng shuffle_rng = make_rng(cfg.seed, /*tag=*/2);
    Rng noise_rng = make_rng(cfg.seed, /*tag=*/3);

    std::vector<int> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    // chunk sizes per epoch; a trailing singleton is merged into the previous
    // batch so batch statistics never degenerate when larger batches were asked
    std::vector<std::size_t> sizes;
    for (std::size_t left = order.size(); left > 0;) {
        const std::size_t take = std::min<std::size_t>(cfg.batch_size, left);
        sizes.push_back(take);
        left -= take;
    }
    if (sizes.size() >= 2 && sizes.back() == 1) {
        sizes.pop_back();
        sizes.back() += 1;
    }
    if (sizes.front() == 1)
        std::cerr << "resvae train: batch size 1; batch statistics degenerate to "
                     "instance statistics\n";

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double total = 0.0;
        std::size_t pos = 0;
        for (const std::size_t take : sizes) {
            std::vector<int> idx(order.begin() + pos, order.begin() + pos + take);
            Tensor4<T> batch = images_to_batch<T>(dataset, idx);
            auto stats = model.train_step(batch, opt, noise_rng);
            total += static_cast<double>(stats.loss) * take;
            pos += take;
        }
        model.epoch_loss.push_back(total / static_cast<double>(order.size()));
    }
    return model;
}

}  // namespace grnea
