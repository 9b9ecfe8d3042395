#pragma once

#include <filesystem>
#include <fstream>

#include "grnea/filter/case_filter.hpp"
#include "grnea/pipeline/dataset.hpp"
#include "grnea/resvae/resvae_checkpoint.hpp"

namespace grnea::pipe {

struct CalibrateOutput {
    filt::FilterConfig filter;
    double acceptance_rate = 0.0;  // held-out reconstructions accepted
    double rejection_rate = 0.0;   // occlusion-corrupted probes rejected
};

namespace detail {

inline Image outline_to_image(const filt::OutlineImage& o) {
    Image img(o.h, o.w);
    for (int y = 0; y < o.h; ++y)
        for (int x = 0; x < o.w; ++x) {
            const float v = o.at(y, x) ? 1.0f : 0.0f;
            img.at(y, x, 0) = img.at(y, x, 1) = img.at(y, x, 2) = v;
        }
    return img;
}

inline void stamp_white_patch(Image& img, int top, int left, int size) {
    for (int y = top; y < std::min(img.h, top + size); ++y)
        for (int x = left; x < std::min(img.w, left + size); ++x)
            img.at(y, x, 0) = img.at(y, x, 1) = img.at(y, x, 2) = 1.0f;
}

}  // namespace detail

/// Build the reference outline from the benchmark's standard case, set C
/// from the quantile of reconstruction noise over the train split, then
/// score acceptance on held-out reconstructions and rejection on occlusion-
/// corrupted probes. Persists filter.json plus the reference outline PNG.
inline CalibrateOutput calibrate_stage(const PipelineConfig& cfg, const Benchmark& bench,
                                       const ResVae<float>& generation) {
    namespace fs = std::filesystem;
    const fs::path root(cfg.out_dir);
    Dataset ds = load_dataset(cfg.out_dir, static_cast<int>(bench.param_names().size()));

    CalibrateOutput out;
    out.filter.reference = filt::binarize_outline(
        filt::rgb_to_hsv(bench.render(bench.reference_design(), cfg.image_size)), out.filter);

    std::vector<Image> train_recons(cfg.n_train);
    parallel_for(cfg.n_train, [&](std::size_t i) {
        train_recons[i] = generation.reconstruct(ds.images[i]);
    });
    out.filter.threshold_c =
        filt::calibrate_threshold(train_recons, out.filter, cfg.calib_quantile, cfg.calib_safety);
    const long pixel_count = static_cast<long>(cfg.image_size) * cfg.image_size;
    if (out.filter.threshold_c > pixel_count / 2)
        throw std::runtime_error("calibrate: threshold C = " +
                                 std::to_string(out.filter.threshold_c) +
                                 " exceeds half the pixel count; the filter would be vacuous");

    const int n_test = cfg.n_samples - cfg.n_train;
    std::vector<Image> test_recons(n_test);
    parallel_for(n_test, [&](std::size_t i) {
        test_recons[i] = generation.reconstruct(ds.images[cfg.n_train + i]);
    });
    int accepted = 0;
    for (const auto& img : test_recons)
        if (filt::is_reasonable(img, out.filter).reasonable) ++accepted;
    out.acceptance_rate = static_cast<double>(accepted) / n_test;

    Rng rng = make_rng(cfg.seed, 0xCA71B);
    const int patch = std::max(4, 20 * cfg.image_size / 64);  // 20 px at the 64-px desk scale
    int rejected = 0;
    const int probes = std::max(100, n_test);
    for (int i = 0; i < probes; ++i) {
        Image img = test_recons[i % test_recons.size()];
        const int top = static_cast<int>(uniform(rng, 0, cfg.image_size - patch + 1));
        const int left = static_cast<int>(uniform(rng, 0, cfg.image_size - patch + 1));
        detail::stamp_white_patch(img, top, left, patch);
        if (!filt::is_reasonable(img, out.filter).reasonable) ++rejected;
    }
    out.rejection_rate = static_cast<double>(rejected) / probes;

    io::write_png((root / "reference_outline.png").string(),
                  detail::outline_to_image(out.filter.reference));
    nlohmann::json j{{"white_s_max", out.filter.white_s_max},
                     {"white_v_min", out.filter.white_v_min},
                     {"threshold_c", out.filter.threshold_c},
                     {"quantile", cfg.calib_quantile},
                     {"safety", cfg.calib_safety},
                     {"acceptance_rate", out.acceptance_rate},
                     {"rejection_rate", out.rejection_rate},
                     {"patch_size", patch}};
    std::ofstream os(root / "filter.json", std::ios::binary | std::ios::trunc);
    os << j.dump(2) << "\n";
    return out;
}

/// Reload a persisted filter (thresholds from filter.json, reference outline
/// from its PNG).
inline filt::FilterConfig load_filter(const std::string& out_dir) {
    namespace fs = std::filesystem;
    const fs::path root(out_dir);
    std::ifstream is(root / "filter.json");
    if (!is) throw std::runtime_error("filter: missing " + (root / "filter.json").string());
    nlohmann::json j = nlohmann::json::parse(is);
    filt::FilterConfig cfg;
    cfg.white_s_max = j.at("white_s_max").get<int>();
    cfg.white_v_min = j.at("white_v_min").get<int>();
    cfg.threshold_c = j.at("threshold_c").get<int>();
    cfg.reference = filt::binarize_outline(
        filt::rgb_to_hsv(io::read_png((root / "reference_outline.png").string())), cfg);
    return cfg;
}

}  // namespace grnea::pipe
