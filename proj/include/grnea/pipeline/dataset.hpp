#pragma once

#include <filesystem>
#include <vector>

#include "grnea/bench/lhs.hpp"
#include "grnea/core/threading.hpp"
#include "grnea/io/csv.hpp"
#include "grnea/io/png_io.hpp"
#include "grnea/pipeline/benchmark.hpp"
#include "grnea/pipeline/config.hpp"

namespace grnea::pipe {

struct Dataset {
    std::vector<Image> images;
    std::vector<std::vector<double>> alphas;
    std::vector<double> objectives;

    std::size_t size() const { return images.size(); }
};

inline std::string case_filename(int id) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "case_%05d.png", id);
    return buf;
}

/// LHS-sample the benchmark box, render every case, evaluate the true
/// objective, and persist images plus a manifest. Idempotent per seed.
inline void sample_dataset(const PipelineConfig& cfg, const Benchmark& bench) {
    namespace fs = std::filesystem;
    const fs::path root(cfg.out_dir);
    const fs::path img_dir = root / "dataset" / "images";
    std::error_code ec;
    fs::create_directories(img_dir, ec);
    if (ec || !fs::exists(img_dir))
        throw std::runtime_error("sample: cannot create output directory " + img_dir.string());

    const auto designs = bench::lhs_sample(bench.bounds(), cfg.n_samples, cfg.seed);

    // render in parallel, write sequentially in case order
    std::vector<Image> images(designs.size());
    parallel_for(designs.size(), [&](std::size_t i) {
        images[i] = bench.render(designs[i], cfg.image_size);
    });

    io::CsvWriter manifest((root / "dataset" / "manifest.csv").string());
    std::vector<std::string> header{"case_id"};
    for (const auto& n : bench.param_names()) header.push_back(n);
    header.push_back("objective");
    const auto extra_names = bench.extra_responses(bench.reference_design());
    for (const auto& [n, v] : extra_names) header.push_back(n);
    manifest.write_row(header);

    for (std::size_t i = 0; i < designs.size(); ++i) {
        io::write_png((img_dir / case_filename(static_cast<int>(i))).string(), images[i]);
        std::vector<std::string> row{std::to_string(i)};
        for (double a : designs[i]) row.push_back(io::format_double(a));
        row.push_back(io::format_double(bench.objective(designs[i])));
        for (const auto& [n, v] : bench.extra_responses(designs[i]))
            row.push_back(io::format_double(v));
        manifest.write_row(row);
    }
}

inline Dataset load_dataset(const std::string& out_dir, int expected_params) {
    namespace fs = std::filesystem;
    const fs::path root(out_dir);
    const fs::path manifest_path = root / "dataset" / "manifest.csv";
    if (!fs::exists(manifest_path))
        throw std::runtime_error("dataset: missing manifest " + manifest_path.string());
    const auto rows = io::read_csv(manifest_path.string());
    if (rows.size() < 2) throw std::runtime_error("dataset: manifest has no cases");

    Dataset ds;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (static_cast<int>(row.size()) < expected_params + 2)
            throw std::runtime_error("dataset: malformed manifest row " + std::to_string(r));
        const int id = std::stoi(row[0]);
        std::vector<double> alpha;
        for (int j = 0; j < expected_params; ++j) alpha.push_back(std::stod(row[1 + j]));
        ds.alphas.push_back(std::move(alpha));
        ds.objectives.push_back(std::stod(row[1 + expected_params]));
        ds.images.push_back(
            io::read_png((root / "dataset" / "images" / case_filename(id)).string()));
    }
    return ds;
}

}  // namespace grnea::pipe
