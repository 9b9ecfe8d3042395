#pragma once

#include "grnea/io/checkpoint.hpp"
#include "grnea/resvae/resvae.hpp"

namespace grnea {

namespace detail {

inline nlohmann::json resvae_config_json(const ResVaeConfig& cfg) {
    return {{"image_size", cfg.image_size},   {"n_blocks", cfg.n_blocks},
            {"base_channels", cfg.base_channels}, {"latent_dim", cfg.latent_dim},
            {"kl_weight", cfg.kl_weight},     {"epochs", cfg.epochs},
            {"batch_size", cfg.batch_size},   {"learning_rate", cfg.learning_rate},
            {"seed", cfg.seed}};
}

inline ResVaeConfig resvae_config_from_json(const nlohmann::json& j) {
    ResVaeConfig cfg;
    cfg.image_size = j.at("image_size").get<int>();
    cfg.n_blocks = j.at("n_blocks").get<int>();
    cfg.base_channels = j.at("base_channels").get<int>();
    cfg.latent_dim = j.at("latent_dim").get<int>();
    cfg.kl_weight = j.at("kl_weight").get<double>();
    cfg.epochs = j.at("epochs").get<int>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

}  // namespace detail

/// Serializes the model into the versioned container: config block plus one
/// named float32 array per parameter.
inline void save_resvae(ResVae<float>& model, const std::string& path) {
    io::Checkpoint ckpt;
    ckpt.config = detail::resvae_config_json(model.config());
    ckpt.config["format"] = "resvae";
    ckpt.config["epoch_loss"] = model.epoch_loss;
    for (const auto& p : model.params()) {
        io::NamedArray a;
        a.name = p.name;
        a.dtype = 0;
        a.dims = {p.count};
        a.f32.assign(p.value, p.value + p.count);
        ckpt.arrays.push_back(std::move(a));
    }
    io::save_checkpoint_file(path, ckpt);
}

/// Rebuilds a model from a checkpoint. When `expected` is given the embedded
/// config must match it exactly.
inline ResVae<float> load_resvae(const std::string& path,
                                 const ResVaeConfig* expected = nullptr) {
    io::Checkpoint ckpt = io::load_checkpoint_file(path);
    if (ckpt.config.value("format", "") != "resvae")
        throw std::runtime_error("checkpoint: not a resvae checkpoint: " + path);
    ResVaeConfig cfg = detail::resvae_config_from_json(ckpt.config);
    if (expected && !(cfg == *expected))
        throw std::runtime_error("checkpoint: config mismatch for " + path +
                                 " (model was trained under a different configuration)");
    ResVae<float> model(cfg);
    if (ckpt.config.contains("epoch_loss"))
        model.epoch_loss = ckpt.config["epoch_loss"].get<std::vector<double>>();
    auto reg = model.params();
    if (reg.size() != ckpt.arrays.size())
        throw std::runtime_error("checkpoint: parameter count mismatch in " + path);
    for (std::size_t i = 0; i < reg.size(); ++i) {
        const auto& a = ckpt.arrays[i];
        if (a.name != reg[i].name || a.dtype != 0 || a.element_count() != reg[i].count)
            throw std::runtime_error("checkpoint: parameter layout mismatch at " + a.name);
        std::copy(a.f32.begin(), a.f32.end(), reg[i].value);
    }
    return model;
}

}  // namespace grnea
