#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>

#include "grnea/io/checkpoint.hpp"
#include "grnea/metrics/image_metrics.hpp"
#include "grnea/pipeline/dataset.hpp"
#include "grnea/resvae/resvae_checkpoint.hpp"
#include "grnea/surrogate/lssvr.hpp"

namespace grnea::pipe {

struct SurrogateBundle {
    svr::LssvrModel objective;
    std::vector<svr::LssvrModel> parameters;
    std::vector<std::string> param_names;
    double objective_min = 0.0, objective_max = 0.0;  // training-set range, CDR normalization
    bench::Bounds design_bounds;
};

struct TrainOutput {
    ResVae<float> generation;
    ResVae<float> reduction;
    SurrogateBundle surrogates;
    nlohmann::json metrics;
    bool floors_passed = true;
};

namespace detail {

inline double ks_against_standard_normal(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double cdf = 0.5 * (1.0 + std::erf(values[i] / std::sqrt(2.0)));
        d = std::max(d, std::abs((i + 1.0) / n - cdf));
        d = std::max(d, std::abs(static_cast<double>(i) / n - cdf));
    }
    return d;
}

/// Posterior means of every image, encoded in mini-batches.
inline Eigen::MatrixXd encode_features(const ResVae<float>& model,
                                       const std::vector<Image>& images) {
    const int dz = model.config().latent_dim;
    Eigen::MatrixXd out(images.size(), dz);
    const std::size_t batch = 32;
    std::vector<int> idx;
    for (std::size_t pos = 0; pos < images.size(); pos += batch) {
        idx.clear();
        for (std::size_t i = pos; i < std::min(images.size(), pos + batch); ++i)
            idx.push_back(static_cast<int>(i));
        Tensor4<float> x = images_to_batch<float>(images, idx);
        Tensor4<float> mu, lv;
        model.encode_batch(x, mu, lv);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (int j = 0; j < dz; ++j)
                out(static_cast<Eigen::Index>(pos + i), j) = mu.at(static_cast<int>(i), j, 0, 0);
    }
    return out;
}

inline void save_surrogates(const std::string& path, const SurrogateBundle& b) {
    io::Checkpoint ckpt;
    nlohmann::json models = nlohmann::json::array();
    auto pack = [&](const svr::LssvrModel& m, const std::string& name) {
        const std::string prefix = "m" + std::to_string(ckpt.arrays.size() / 4);
        models.push_back({{"name", name},
                          {"sigma", m.sigma_k},
                          {"gamma", m.gamma_r},
                          {"bias", m.bias}});
        io::NamedArray sup;
        sup.name = prefix + ".support";
        sup.dtype = 1;
        sup.dims = {static_cast<std::uint64_t>(m.support.rows()),
                    static_cast<std::uint64_t>(m.support.cols())};
        for (int i = 0; i < m.support.rows(); ++i)
            for (int j = 0; j < m.support.cols(); ++j) sup.f64.push_back(m.support(i, j));
        ckpt.arrays.push_back(std::move(sup));
        auto vec = [&](const Eigen::VectorXd& v, const std::string& nm) {
            io::NamedArray a;
            a.name = prefix + "." + nm;
            a.dtype = 1;
            a.dims = {static_cast<std::uint64_t>(v.size())};
            a.f64.assign(v.data(), v.data() + v.size());
            ckpt.arrays.push_back(std::move(a));
        };
        vec(m.alpha, "alpha");
        vec(m.feat_mean, "feat_mean");
        vec(m.feat_scale, "feat_scale");
    };
    pack(b.objective, "objective");
    for (std::size_t i = 0; i < b.parameters.size(); ++i)
        pack(b.parameters[i], b.param_names[i]);
    ckpt.config = {{"format", "lssvr_bundle"},
                   {"models", models},
                   {"param_names", b.param_names},
                   {"objective_min", b.objective_min},
                   {"objective_max", b.objective_max},
                   {"bounds_lower", b.design_bounds.lower},
                   {"bounds_upper", b.design_bounds.upper}};
    io::save_checkpoint_file(path, ckpt);
}

inline SurrogateBundle load_surrogates(const std::string& path) {
    io::Checkpoint ckpt = io::load_checkpoint_file(path);
    if (ckpt.config.value("format", "") != "lssvr_bundle")
        throw std::runtime_error("surrogates: not an lssvr bundle: " + path);
    SurrogateBundle b;
    b.param_names = ckpt.config.at("param_names").get<std::vector<std::string>>();
    b.objective_min = ckpt.config.at("objective_min").get<double>();
    b.objective_max = ckpt.config.at("objective_max").get<double>();
    b.design_bounds.lower = ckpt.config.at("bounds_lower").get<std::vector<double>>();
    b.design_bounds.upper = ckpt.config.at("bounds_upper").get<std::vector<double>>();
    const auto& models = ckpt.config.at("models");
    if (ckpt.arrays.size() != 4 * models.size())
        throw std::runtime_error("surrogates: array count mismatch in " + path);
    for (std::size_t m = 0; m < models.size(); ++m) {
        svr::LssvrModel model;
        model.sigma_k = models[m].at("sigma").get<double>();
        model.gamma_r = models[m].at("gamma").get<double>();
        model.bias = models[m].at("bias").get<double>();
        const auto& sup = ckpt.arrays[4 * m];
        const auto rows = static_cast<Eigen::Index>(sup.dims.at(0));
        const auto cols = static_cast<Eigen::Index>(sup.dims.at(1));
        model.support.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) model.support(i, j) = sup.f64[i * cols + j];
        auto vec = [&](std::size_t k) {
            const auto& a = ckpt.arrays[4 * m + k];
            return Eigen::Map<const Eigen::VectorXd>(a.f64.data(),
                                                     static_cast<Eigen::Index>(a.f64.size()))
                .eval();
        };
        model.alpha = vec(1);
        model.feat_mean = vec(2);
        model.feat_scale = vec(3);
        if (models[m].at("name").get<std::string>() == "objective")
            b.objective = std::move(model);
        else
            b.parameters.push_back(std::move(model));
    }
    return b;
}

}  // namespace detail

/// Train both ResVAEs on the train split, fit the objective and parameter
/// surrogates over 16-dim features, score everything on the held-out split
/// and persist checkpoints plus a metrics block.
inline TrainOutput train_stage(const PipelineConfig& cfg, const Benchmark& bench) {
    namespace fs = std::filesystem;
    cfg.validate();
    const fs::path root(cfg.out_dir);
    Dataset ds = load_dataset(cfg.out_dir, static_cast<int>(bench.param_names().size()));
    if (static_cast<int>(ds.size()) != cfg.n_samples)
        throw std::runtime_error("train: dataset size " + std::to_string(ds.size()) +
                                 " does not match configured n_samples");

    std::vector<Image> train_imgs(ds.images.begin(), ds.images.begin() + cfg.n_train);
    std::vector<Image> test_imgs(ds.images.begin() + cfg.n_train, ds.images.end());

    ResVaeConfig gen_cfg = cfg.generation;
    gen_cfg.seed = mix_seed(cfg.seed, 0x6E6);
    ResVaeConfig red_cfg = cfg.reduction;
    red_cfg.seed = mix_seed(cfg.seed, 0xD12);

    TrainOutput out{train_resvae<float>(gen_cfg, train_imgs),
                    train_resvae<float>(red_cfg, train_imgs),
                    {},
                    {},
                    true};

    // held-out reconstruction quality, both models
    auto recon_metrics = [&](const ResVae<float>& model) {
        double mse_sum = 0.0, psnr_sum = 0.0, ssim_sum = 0.0;
        for (const auto& img : test_imgs) {
            Image recon = model.reconstruct(img);
            const double m = metrics::mse(img, recon);
            mse_sum += m;
            psnr_sum += metrics::psnr(m, 1.0);
            ssim_sum += metrics::ssim(img, recon);
        }
        const double n = static_cast<double>(test_imgs.size());
        return nlohmann::json{
            {"mse", mse_sum / n}, {"psnr", psnr_sum / n}, {"ssim", ssim_sum / n}};
    };
    nlohmann::json gen_m = recon_metrics(out.generation);
    nlohmann::json red_m = recon_metrics(out.reduction);

    // latent prior conformance of the generation model over the train split
    Eigen::MatrixXd gen_mu = detail::encode_features(out.generation, train_imgs);
    double worst_mean = 0.0;
    std::vector<double> ks_per_dim;
    for (int j = 0; j < gen_mu.cols(); ++j) {
        worst_mean = std::max(worst_mean, std::abs(gen_mu.col(j).mean()));
        std::vector<double> col(gen_mu.rows());
        for (int i = 0; i < gen_mu.rows(); ++i) col[i] = gen_mu(i, j);
        ks_per_dim.push_back(detail::ks_against_standard_normal(std::move(col)));
    }
    std::sort(ks_per_dim.begin(), ks_per_dim.end());
    const double ks_median = ks_per_dim[ks_per_dim.size() / 2];

    // 16-dim features for the surrogates
    Eigen::MatrixXd feat_train = detail::encode_features(out.reduction, train_imgs);
    Eigen::MatrixXd feat_test = detail::encode_features(out.reduction, test_imgs);

    Eigen::VectorXd obj_train(cfg.n_train), obj_test(cfg.n_samples - cfg.n_train);
    for (int i = 0; i < cfg.n_train; ++i) obj_train(i) = ds.objectives[i];
    for (int i = cfg.n_train; i < cfg.n_samples; ++i) obj_test(i - cfg.n_train) = ds.objectives[i];

    out.surrogates.param_names = bench.param_names();
    out.surrogates.design_bounds = bench.bounds();
    out.surrogates.objective_min = obj_train.minCoeff();
    out.surrogates.objective_max = obj_train.maxCoeff();

    const auto sigma_grid = svr::default_sigma_grid(feat_train, cfg.sigma_grid_points);
    auto fit_target = [&](const Eigen::VectorXd& y, std::uint64_t tag) {
        auto [sigma, gamma] =
            svr::grid_search(feat_train, y, sigma_grid, cfg.gamma_grid, cfg.k_folds,
                             mix_seed(cfg.seed, tag));
        return svr::fit(feat_train, y, sigma, gamma);
    };
    out.surrogates.objective = fit_target(obj_train, 0x0B1);
    auto obj_eval = svr::evaluate(out.surrogates.objective, feat_test, obj_test);

    nlohmann::json param_metrics = nlohmann::json::array();
    double param_r2_sum = 0.0;
    const int p = static_cast<int>(bench.param_names().size());
    for (int j = 0; j < p; ++j) {
        Eigen::VectorXd col_train(cfg.n_train), col_test(cfg.n_samples - cfg.n_train);
        for (int i = 0; i < cfg.n_train; ++i) col_train(i) = ds.alphas[i][j];
        for (int i = cfg.n_train; i < cfg.n_samples; ++i)
            col_test(i - cfg.n_train) = ds.alphas[i][j];
        out.surrogates.parameters.push_back(fit_target(col_train, 0x100 + j));
        auto ev = svr::evaluate(out.surrogates.parameters.back(), feat_test, col_test);
        param_r2_sum += ev.r_squared;
        param_metrics.push_back({{"name", bench.param_names()[j]},
                                 {"r_squared", ev.r_squared},
                                 {"raae", ev.raae},
                                 {"rmae", ev.rmae}});
    }

    fs::create_directories(root / "checkpoints");
    save_resvae(out.generation, (root / "checkpoints" / "generation.ckpt").string());
    save_resvae(out.reduction, (root / "checkpoints" / "reduction.ckpt").string());
    detail::save_surrogates((root / "checkpoints" / "surrogates.ckpt").string(), out.surrogates);

    const bool psnr_ok = gen_m["psnr"].get<double>() >= cfg.floor_psnr;
    const bool ssim_ok = gen_m["ssim"].get<double>() >= cfg.floor_ssim;
    const bool r2_ok = obj_eval.r_squared >= cfg.floor_objective_r2;
    out.floors_passed = psnr_ok && ssim_ok && r2_ok;

    out.metrics = {
        {"generation", gen_m},
        {"reduction", red_m},
        {"latent_prior", {{"mu_mean_abs_max", worst_mean}, {"ks_median", ks_median}}},
        {"surrogates",
         {{"objective",
           {{"r_squared", obj_eval.r_squared},
            {"raae", obj_eval.raae},
            {"rmae", obj_eval.rmae},
            {"sigma", out.surrogates.objective.sigma_k},
            {"gamma", out.surrogates.objective.gamma_r}}},
          {"parameters", param_metrics},
          {"parameters_mean_r2", param_r2_sum / p}}},
        {"objective_range",
         {{"min", out.surrogates.objective_min}, {"max", out.surrogates.objective_max}}},
        {"floors",
         {{"psnr_pass", psnr_ok},
          {"ssim_pass", ssim_ok},
          {"objective_r2_pass", r2_ok}}},
        {"epoch_loss",
         {{"generation", out.generation.epoch_loss}, {"reduction", out.reduction.epoch_loss}}}};

    std::ofstream os(root / "metrics.json", std::ios::binary | std::ios::trunc);
    os << out.metrics.dump(2) << "\n";
    return out;
}

}  // namespace grnea::pipe
