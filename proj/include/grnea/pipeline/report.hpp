#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>

#include "grnea/io/csv.hpp"
#include "grnea/io/png_io.hpp"
#include "grnea/pipeline/plot.hpp"

#include <json.hpp>

namespace grnea::pipe {

/// Read-only rendering of a completed run: convergence curve, a flat metric
/// CSV, and a formatted text report. Every number is copied from persisted
/// artifacts; nothing is recomputed.
inline void report_stage(const std::string& run_dir) {
    namespace fs = std::filesystem;
    const fs::path root(run_dir);

    const std::vector<std::string> required{
        "config.json",        "dataset/manifest.csv",
        "metrics.json",       "filter.json",
        "reference_outline.png", "trace.csv",
        "report.json",        "best_case.png",
        "verified_case.png",  "checkpoints/generation.ckpt",
        "checkpoints/reduction.ckpt", "checkpoints/surrogates.ckpt"};
    std::vector<std::string> missing;
    for (const auto& rel : required)
        if (!fs::exists(root / rel)) missing.push_back(rel);
    if (!missing.empty()) {
        std::string msg = "report: missing artifacts:";
        for (const auto& m : missing) msg += "\n  - " + m;
        throw std::runtime_error(msg);
    }

    nlohmann::json metrics, report;
    {
        std::ifstream ms(root / "metrics.json");
        ms >> metrics;
        std::ifstream rs(root / "report.json");
        rs >> report;
    }
    const auto trace = io::read_csv((root / "trace.csv").string());

    fs::create_directories(root / "report");

    // convergence curve from the persisted trace
    std::vector<double> xs, ys;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        xs.push_back(std::stod(trace[i][0]));
        ys.push_back(std::stod(trace[i][1]));
    }
    io::write_png((root / "report" / "convergence.png").string(), render_line_plot(xs, ys));

    // flat metric table
    io::CsvWriter csv((root / "report" / "metrics.csv").string());
    csv.write_row({"metric", "value"});
    auto emit = [&csv](const std::string& key, const nlohmann::json& v) {
        csv.write_row({key, v.is_number() ? io::format_double(v.get<double>()) : v.dump()});
    };
    for (const auto& model : {"generation", "reduction"})
        for (const auto& k : {"psnr", "ssim", "mse"})
            emit(std::string(model) + "." + k, metrics.at(model).at(k));
    emit("surrogates.objective.r_squared", metrics["surrogates"]["objective"]["r_squared"]);
    emit("surrogates.objective.raae", metrics["surrogates"]["objective"]["raae"]);
    emit("surrogates.objective.rmae", metrics["surrogates"]["objective"]["rmae"]);
    emit("surrogates.parameters_mean_r2", metrics["surrogates"]["parameters_mean_r2"]);
    emit("latent_prior.ks_median", metrics["latent_prior"]["ks_median"]);
    emit("cdr.mean", report["cdr"]["mean"]);
    emit("cdr.variance", report["cdr"]["variance"]);
    emit("cdr.pass", report["cdr"]["pass"]);
    emit("optimum.predicted_objective", report["optimum"]["predicted_objective"]);
    emit("optimum.true_objective", report["optimum"]["true_objective"]);
    csv.close();

    // formatted text summary
    std::ostringstream txt;
    txt << "GRN-EA run summary (" << report.value("benchmark", "?") << ", seed "
        << report.value("seed", 0) << ")\n\n";
    txt << "Reconstruction quality (held-out split)\n";
    for (const auto& model : {"generation", "reduction"}) {
        txt << "  " << model << ": PSNR " << metrics[model]["psnr"].get<double>() << " dB, SSIM "
            << metrics[model]["ssim"].get<double>() << ", MSE "
            << metrics[model]["mse"].get<double>() << "\n";
    }
    txt << "\nSurrogates (held-out split)\n";
    txt << "  objective: R2 " << metrics["surrogates"]["objective"]["r_squared"].get<double>()
        << ", RAAE " << metrics["surrogates"]["objective"]["raae"].get<double>() << ", RMAE "
        << metrics["surrogates"]["objective"]["rmae"].get<double>() << "\n";
    txt << "  design parameters: mean R2 "
        << metrics["surrogates"]["parameters_mean_r2"].get<double>() << "\n";
    txt << "\nCase diversity\n";
    txt << "  normalized objective mean " << report["cdr"]["mean"].get<double>() << ", variance "
        << report["cdr"]["variance"].get<double>() << " ("
        << (report["cdr"]["pass"].get<bool>() ? "pass" : "fail") << ", "
        << report["cdr"]["cases"].get<long>() << " cases)\n";
    txt << "\nOptimization\n";
    txt << "  evaluations " << report["search"]["evaluations"].get<long>() << " ("
        << report["search"]["infeasible_evaluations"].get<long>() << " filtered)\n";
    txt << "  predicted objective at optimum "
        << report["optimum"]["predicted_objective"].get<double>() << "\n";
    txt << "  verified true objective        "
        << report["optimum"]["true_objective"].get<double>() << "\n";
    txt << "  recovered design:";
    for (const auto& v : report["optimum"]["alpha_star"]) txt << " " << v.get<double>();
    txt << "\n";
    std::ofstream os(root / "report" / "report.txt", std::ios::binary | std::ios::trunc);
    os << txt.str();
}

}  // namespace grnea::pipe
