#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "grnea/metrics/image_metrics.hpp"
#include "grnea/pipeline/calibrate.hpp"
#include "grnea/pipeline/config.hpp"
#include "grnea/pipeline/dataset.hpp"
#include "grnea/pipeline/errors.hpp"
#include "grnea/pipeline/optimize.hpp"
#include "grnea/pipeline/report.hpp"
#include "grnea/pipeline/train.hpp"

namespace fs = std::filesystem;
using namespace grnea;

namespace {

struct StageArgs {
    std::string config_path;
    std::string out;
    std::string benchmark;
    std::uint64_t seed = 0;
    // scalar overrides, applied after the config file
    int samples = -1, train_count = -1, image_size = -1, iterations = -1;
    double latent_bound = -1.0;
};

void add_stage_options(CLI::App* cmd, StageArgs& a) {
    cmd->add_option("--config", a.config_path, "JSON config document");
    cmd->add_option("--seed", a.seed, "global run seed")->required();
    cmd->add_option("--out", a.out, "run directory")->required();
    cmd->add_option("--benchmark", a.benchmark, "fiber | strain")->required();
    cmd->add_option("--samples", a.samples, "dataset size override");
    cmd->add_option("--train-count", a.train_count, "training split size override");
    cmd->add_option("--image-size", a.image_size, "raster resolution override");
    cmd->add_option("--iterations", a.iterations, "optimizer iteration override");
    cmd->add_option("--latent-bound", a.latent_bound, "latent search half-width override");
}

pipe::PipelineConfig effective_config(const StageArgs& a) {
    pipe::PipelineConfig cfg;
    if (!a.config_path.empty()) {
        std::ifstream is(a.config_path);
        if (!is) throw std::invalid_argument("cannot open config " + a.config_path);
        nlohmann::json j = nlohmann::json::parse(is);
        pipe::apply_json(j, cfg);
    }
    cfg.seed = a.seed;
    cfg.out_dir = a.out;
    cfg.benchmark = a.benchmark;
    if (a.samples > 0) cfg.n_samples = a.samples;
    if (a.train_count > 0) cfg.n_train = a.train_count;
    if (a.image_size > 0) {
        cfg.image_size = a.image_size;
        cfg.generation.image_size = a.image_size;
        cfg.reduction.image_size = a.image_size;
    }
    if (a.iterations > 0) cfg.iterations = a.iterations;
    if (a.latent_bound > 0) cfg.latent_bound = a.latent_bound;
    cfg.validate();
    return cfg;
}

void record_timing(const std::string& out_dir, const std::string& stage, double seconds) {
    const fs::path path = fs::path(out_dir) / "timings.json";
    nlohmann::json j;
    if (fs::exists(path)) {
        std::ifstream is(path);
        is >> j;
    }
    j[stage] = seconds;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << j.dump(2) << "\n";
}

class StageTimer {
public:
    StageTimer(std::string out_dir, std::string stage)
        : out_(std::move(out_dir)), stage_(std::move(stage)),
          start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        try {
            record_timing(out_, stage_, s);
        } catch (...) {
        }
    }

private:
    std::string out_, stage_;
    std::chrono::steady_clock::time_point start_;
};

void require_artifact(const fs::path& p) {
    if (!fs::exists(p)) throw pipe::MissingArtifactError("missing artifact: " + p.string());
}

int cmd_sample(const StageArgs& a) {
    auto cfg = effective_config(a);
    auto bench = pipe::make_benchmark(cfg.benchmark);
    fs::create_directories(cfg.out_dir);
    StageTimer timer(cfg.out_dir, "sample");
    pipe::sample_dataset(cfg, *bench);
    std::ofstream os(fs::path(cfg.out_dir) / "config.json", std::ios::binary | std::ios::trunc);
    os << pipe::to_json(cfg).dump(2) << "\n";
    std::cout << "sample: wrote " << cfg.n_samples << " cases to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_train(const StageArgs& a) {
    auto cfg = effective_config(a);
    auto bench = pipe::make_benchmark(cfg.benchmark);
    require_artifact(fs::path(cfg.out_dir) / "dataset" / "manifest.csv");
    StageTimer timer(cfg.out_dir, "train");
    auto out = pipe::train_stage(cfg, *bench);
    std::cout << "train: generation PSNR " << out.metrics["generation"]["psnr"].get<double>()
              << " dB, SSIM " << out.metrics["generation"]["ssim"].get<double>()
              << "; objective R2 "
              << out.metrics["surrogates"]["objective"]["r_squared"].get<double>() << "\n";
    if (!out.floors_passed) {
        std::cerr << "train: a floor metric failed (see metrics.json)\n";
        return 1;
    }
    return 0;
}

int cmd_calibrate(const StageArgs& a) {
    auto cfg = effective_config(a);
    auto bench = pipe::make_benchmark(cfg.benchmark);
    const fs::path gen_path = fs::path(cfg.out_dir) / "checkpoints" / "generation.ckpt";
    require_artifact(gen_path);
    require_artifact(fs::path(cfg.out_dir) / "dataset" / "manifest.csv");
    StageTimer timer(cfg.out_dir, "calibrate");
    auto generation = load_resvae(gen_path.string());
    auto out = pipe::calibrate_stage(cfg, *bench, generation);
    std::cout << "calibrate: C = " << out.filter.threshold_c << ", acceptance "
              << out.acceptance_rate << ", corrupted rejection " << out.rejection_rate << "\n";
    return 0;
}

int cmd_optimize(const StageArgs& a) {
    auto cfg = effective_config(a);
    auto bench = pipe::make_benchmark(cfg.benchmark);
    const fs::path ck = fs::path(cfg.out_dir) / "checkpoints";
    require_artifact(ck / "generation.ckpt");
    require_artifact(ck / "reduction.ckpt");
    require_artifact(ck / "surrogates.ckpt");
    require_artifact(fs::path(cfg.out_dir) / "filter.json");
    StageTimer timer(cfg.out_dir, "optimize");
    auto generation = load_resvae((ck / "generation.ckpt").string());
    auto reduction = load_resvae((ck / "reduction.ckpt").string());
    auto surrogates = pipe::detail::load_surrogates((ck / "surrogates.ckpt").string());
    auto filter = pipe::load_filter(cfg.out_dir);
    auto out = pipe::optimize_stage(cfg, *bench, generation, reduction, surrogates, filter);
    std::cout << "optimize: predicted " << out.predicted_objective << ", verified true "
              << out.true_objective << ", CDR " << (out.cdr.pass ? "pass" : "fail") << " (mean "
              << out.cdr.mean << ", var " << out.cdr.variance << ")\n";
    return 0;
}

int cmd_metrics(const std::string& dir_a, const std::string& dir_b, const std::string& out_csv) {
    auto list_pngs = [](const std::string& dir) {
        std::vector<std::string> names;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".png") names.push_back(e.path().filename().string());
        std::sort(names.begin(), names.end());
        return names;
    };
    if (!fs::is_directory(dir_a) || !fs::is_directory(dir_b))
        throw pipe::MissingArtifactError("metrics: image directory not found");
    const auto a_names = list_pngs(dir_a);
    const auto b_names = list_pngs(dir_b);
    std::vector<std::string> common;
    std::set_intersection(a_names.begin(), a_names.end(), b_names.begin(), b_names.end(),
                          std::back_inserter(common));
    if (common.empty()) throw std::invalid_argument("metrics: no matching file names");

    io::CsvWriter csv(out_csv);
    csv.write_row({"file", "mse", "psnr", "ssim"});
    double mse_sum = 0, psnr_sum = 0, ssim_sum = 0;
    for (const auto& name : common) {
        const Image ia = io::read_png((fs::path(dir_a) / name).string());
        const Image ib = io::read_png((fs::path(dir_b) / name).string());
        const double m = metrics::mse(ia, ib);
        const double p = metrics::psnr(m, 1.0);
        const double s = metrics::ssim(ia, ib);
        csv.write_row({name, io::format_double(m), io::format_double(p), io::format_double(s)});
        mse_sum += m;
        psnr_sum += p;
        ssim_sum += s;
    }
    const double n = static_cast<double>(common.size());
    csv.write_row({"__mean__", io::format_double(mse_sum / n), io::format_double(psnr_sum / n),
                   io::format_double(ssim_sum / n)});
    std::cout << "metrics: " << common.size() << " pairs, mean PSNR " << psnr_sum / n << " dB\n";
    return 0;
}

int cmd_filter(const std::string& run_dir, const std::string& in_dir,
               const std::string& out_csv) {
    require_artifact(fs::path(run_dir) / "filter.json");
    require_artifact(fs::path(run_dir) / "reference_outline.png");
    auto filter = pipe::load_filter(run_dir);
    if (!fs::is_directory(in_dir))
        throw pipe::MissingArtifactError("filter: image directory not found: " + in_dir);
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(in_dir))
        if (e.path().extension() == ".png") names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    io::CsvWriter csv(out_csv);
    csv.write_row({"file", "n_noise", "reasonable"});
    int accepted = 0;
    for (const auto& name : names) {
        const Image img = io::read_png((fs::path(in_dir) / name).string());
        const auto d = filt::is_reasonable(img, filter);
        csv.write_row({name, std::to_string(d.n_noise), d.reasonable ? "1" : "0"});
        if (d.reasonable) ++accepted;
    }
    std::cout << "filter: " << accepted << "/" << names.size() << " accepted (C = "
              << filter.threshold_c << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generative-reverse-net assisted evolutionary optimization pipeline"};
    app.require_subcommand(1);

    StageArgs sample_args, train_args, calib_args, opt_args;
    add_stage_options(app.add_subcommand("sample", "LHS-sample and render the dataset"),
                      sample_args);
    add_stage_options(app.add_subcommand("train", "train ResVAEs and fit LSSVR surrogates"),
                      train_args);
    add_stage_options(app.add_subcommand("calibrate", "calibrate the case-filter threshold"),
                      calib_args);
    add_stage_options(app.add_subcommand("optimize", "search the latent space and verify"),
                      opt_args);

    std::string m_a, m_b, m_out;
    auto* metrics_cmd = app.add_subcommand("metrics", "pairwise MSE/PSNR/SSIM of two image dirs");
    metrics_cmd->add_option("--dir-a", m_a)->required();
    metrics_cmd->add_option("--dir-b", m_b)->required();
    metrics_cmd->add_option("--out", m_out, "output CSV path")->required();

    std::string f_run, f_in, f_out;
    auto* filter_cmd = app.add_subcommand("filter", "score a directory of images with a run's filter");
    filter_cmd->add_option("--run", f_run, "run directory holding filter.json")->required();
    filter_cmd->add_option("--in", f_in, "directory of PNGs")->required();
    filter_cmd->add_option("--out", f_out, "output CSV path")->required();

    std::string r_run;
    auto* report_cmd = app.add_subcommand("report", "render report files for a completed run");
    report_cmd->add_option("--out", r_run, "run directory")->required();

    try {
        app.parse(argc, argv);
        if (app.got_subcommand("sample")) return cmd_sample(sample_args);
        if (app.got_subcommand("train")) return cmd_train(train_args);
        if (app.got_subcommand("calibrate")) return cmd_calibrate(calib_args);
        if (app.got_subcommand("optimize")) return cmd_optimize(opt_args);
        if (app.got_subcommand("metrics")) return cmd_metrics(m_a, m_b, m_out);
        if (app.got_subcommand("filter")) return cmd_filter(f_run, f_in, f_out);
        if (app.got_subcommand("report")) {
            pipe::report_stage(r_run);
            std::cout << "report: wrote " << (fs::path(r_run) / "report").string() << "\n";
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const pipe::MissingArtifactError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        const std::string what = e.what();
        std::cerr << what << "\n";
        return what.rfind("report: missing artifacts", 0) == 0 ? 2 : 1;
    }
    return 1;
}
