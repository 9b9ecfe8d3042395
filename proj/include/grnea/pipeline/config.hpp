#pragma once

#include <json.hpp>

#include <set>
#include <string>

#include "grnea/opt/arpso.hpp"
#include "grnea/resvae/resvae.hpp"

namespace grnea::pipe {

/// Full pipeline configuration. Defaults are the desk-scale fiber setup;
/// every key can come from a JSON config document, and CLI flags override
/// their keys last.
struct PipelineConfig {
    std::string benchmark = "fiber";  // fiber | strain
    std::uint64_t seed = 1;
    std::string out_dir;

    int n_samples = 400;
    int n_train = 300;
    int image_size = 64;

    ResVaeConfig generation;
    ResVaeConfig reduction;

    // surrogate search
    int k_folds = 5;
    std::vector<double> gamma_grid{1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
    int sigma_grid_points = 7;

    // filter calibration
    double calib_quantile = 0.99;
    double calib_safety = 1.2;

    // latent-space search
    int iterations = 100;
    double latent_bound = 3.0;
    pso::ArpsoConfig arpso;

    // diversity check
    int cdr_min_cases = 1000;
    double cdr_tol_mean = 0.15;
    double cdr_tol_var = 0.03;

    // acceptance floors enforced by the train stage
    double floor_psnr = 20.0;
    double floor_ssim = 0.90;
    double floor_objective_r2 = 0.90;

    PipelineConfig() {
        generation.image_size = 64;
        generation.n_blocks = 4;
        generation.base_channels = 8;
        generation.latent_dim = 32;
        generation.kl_weight = 2e-2;
        generation.epochs = 60;
        generation.batch_size = 16;
        generation.learning_rate = 1e-3;

        reduction = generation;
        reduction.latent_dim = 16;
        reduction.kl_weight = 1e-3;
        reduction.epochs = 60;
    }

    void validate() const {
        if (benchmark != "fiber" && benchmark != "strain")
            throw std::invalid_argument("config: benchmark must be 'fiber' or 'strain'");
        if (out_dir.empty()) throw std::invalid_argument("config: output directory not set");
        if (n_samples < 1) throw std::invalid_argument("config: n_samples must be >= 1");
        if (n_train < 1 || n_train >= n_samples)
            throw std::invalid_argument("config: need 1 <= n_train < n_samples");
        if (image_size != generation.image_size || image_size != reduction.image_size)
            throw std::invalid_argument("config: model image sizes must match dataset size");
        generation.validate();
        reduction.validate();
        if (reduction.latent_dim != 16)
            throw std::invalid_argument("config: the feature compression is 16-dimensional");
        if (iterations < 1) throw std::invalid_argument("config: iterations must be >= 1");
        if (!(latent_bound > 0)) throw std::invalid_argument("config: latent_bound must be > 0");
        if (!(calib_quantile > 0.0) || calib_quantile > 1.0)
            throw std::invalid_argument("config: calib_quantile must be in (0, 1]");
        if (cdr_min_cases < 100)
            throw std::invalid_argument("config: cdr_min_cases must be >= 100");
    }
};

namespace detail {

inline void resvae_from_json(const nlohmann::json& j, ResVaeConfig& cfg) {
    cfg.image_size = j.value("image_size", cfg.image_size);
    cfg.n_blocks = j.value("n_blocks", cfg.n_blocks);
    cfg.base_channels = j.value("base_channels", cfg.base_channels);
    cfg.latent_dim = j.value("latent_dim", cfg.latent_dim);
    cfg.kl_weight = j.value("kl_weight", cfg.kl_weight);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
}

inline nlohmann::json resvae_to_json(const ResVaeConfig& cfg) {
    return {{"image_size", cfg.image_size},       {"n_blocks", cfg.n_blocks},
            {"base_channels", cfg.base_channels}, {"latent_dim", cfg.latent_dim},
            {"kl_weight", cfg.kl_weight},         {"epochs", cfg.epochs},
            {"batch_size", cfg.batch_size},       {"learning_rate", cfg.learning_rate}};
}

}  // namespace detail

/// Overlay a JSON document onto the defaults. Unknown keys are rejected at
/// the top level so typos fail loudly.
inline void apply_json(const nlohmann::json& j, PipelineConfig& cfg) {
    static const std::set<std::string> known{
        "benchmark",     "seed",          "out",           "n_samples",
        "n_train",       "image_size",    "generation",    "reduction",
        "k_folds",       "gamma_grid",    "sigma_grid_points", "calib_quantile",
        "calib_safety",  "iterations",    "latent_bound",  "arpso",
        "cdr_min_cases", "cdr_tol_mean",  "cdr_tol_var",   "floor_psnr",
        "floor_ssim",    "floor_objective_r2"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "'");

    cfg.benchmark = j.value("benchmark", cfg.benchmark);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.n_samples = j.value("n_samples", cfg.n_samples);
    cfg.n_train = j.value("n_train", cfg.n_train);
    cfg.image_size = j.value("image_size", cfg.image_size);
    if (j.contains("generation")) detail::resvae_from_json(j["generation"], cfg.generation);
    if (j.contains("reduction")) detail::resvae_from_json(j["reduction"], cfg.reduction);
    cfg.k_folds = j.value("k_folds", cfg.k_folds);
    if (j.contains("gamma_grid")) cfg.gamma_grid = j["gamma_grid"].get<std::vector<double>>();
    cfg.sigma_grid_points = j.value("sigma_grid_points", cfg.sigma_grid_points);
    cfg.calib_quantile = j.value("calib_quantile", cfg.calib_quantile);
    cfg.calib_safety = j.value("calib_safety", cfg.calib_safety);
    cfg.iterations = j.value("iterations", cfg.iterations);
    cfg.latent_bound = j.value("latent_bound", cfg.latent_bound);
    if (j.contains("arpso")) {
        const auto& a = j["arpso"];
        cfg.arpso.swarm_size = a.value("swarm_size", cfg.arpso.swarm_size);
        cfg.arpso.m_add = a.value("m_add", cfg.arpso.m_add);
        cfg.arpso.add_horizon = a.value("add_horizon", cfg.arpso.add_horizon);
        cfg.arpso.reset_fraction = a.value("reset_fraction", cfg.arpso.reset_fraction);
        cfg.arpso.inertia = a.value("inertia", cfg.arpso.inertia);
        cfg.arpso.cognitive = a.value("cognitive", cfg.arpso.cognitive);
        cfg.arpso.social = a.value("social", cfg.arpso.social);
    }
    cfg.cdr_min_cases = j.value("cdr_min_cases", cfg.cdr_min_cases);
    cfg.cdr_tol_mean = j.value("cdr_tol_mean", cfg.cdr_tol_mean);
    cfg.cdr_tol_var = j.value("cdr_tol_var", cfg.cdr_tol_var);
    cfg.floor_psnr = j.value("floor_psnr", cfg.floor_psnr);
    cfg.floor_ssim = j.value("floor_ssim", cfg.floor_ssim);
    cfg.floor_objective_r2 = j.value("floor_objective_r2", cfg.floor_objective_r2);

    // the dataset image size drives both models unless explicitly diverged
    if (j.contains("image_size") && !j.contains("generation")) {
        cfg.generation.image_size = cfg.image_size;
        cfg.reduction.image_size = cfg.image_size;
    }
}

inline nlohmann::json to_json(const PipelineConfig& cfg) {
    nlohmann::json j;
    j["benchmark"] = cfg.benchmark;
    j["seed"] = cfg.seed;
    j["out"] = cfg.out_dir;
    j["n_samples"] = cfg.n_samples;
    j["n_train"] = cfg.n_train;
    j["image_size"] = cfg.image_size;
    j["generation"] = detail::resvae_to_json(cfg.generation);
    j["reduction"] = detail::resvae_to_json(cfg.reduction);
    j["k_folds"] = cfg.k_folds;
    j["gamma_grid"] = cfg.gamma_grid;
    j["sigma_grid_points"] = cfg.sigma_grid_points;
    j["calib_quantile"] = cfg.calib_quantile;
    j["calib_safety"] = cfg.calib_safety;
    j["iterations"] = cfg.iterations;
    j["latent_bound"] = cfg.latent_bound;
    j["arpso"] = {{"swarm_size", cfg.arpso.swarm_size},
                  {"m_add", cfg.arpso.m_add},
                  {"add_horizon", cfg.arpso.add_horizon},
                  {"reset_fraction", cfg.arpso.reset_fraction},
                  {"inertia", cfg.arpso.inertia},
                  {"cognitive", cfg.arpso.cognitive},
                  {"social", cfg.arpso.social}};
    j["cdr_min_cases"] = cfg.cdr_min_cases;
    j["cdr_tol_mean"] = cfg.cdr_tol_mean;
    j["cdr_tol_var"] = cfg.cdr_tol_var;
    j["floor_psnr"] = cfg.floor_psnr;
    j["floor_ssim"] = cfg.floor_ssim;
    j["floor_objective_r2"] = cfg.floor_objective_r2;
    return j;
}

}  // namespace grnea::pipe
