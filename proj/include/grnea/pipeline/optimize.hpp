#pragma once

#include <filesystem>
#include <fstream>

#include "grnea/metrics/diversity.hpp"
#include "grnea/pipeline/calibrate.hpp"
#include "grnea/pipeline/train.hpp"

namespace grnea::pipe {

struct OptimizeOutput {
    metrics::CdrResult cdr;
    long cdr_cases = 0;
    double probe_acceptance = 0.0;
    std::vector<double> best_z;
    double predicted_objective = 0.0;
    std::vector<double> alpha_star;
    double true_objective = 0.0;
    pso::Result search;
    nlohmann::json report;
};

namespace detail {

inline Eigen::VectorXd features_of(const ResVae<float>& reduction, const Image& img) {
    const auto g = reduction.encode(img);
    Eigen::VectorXd f(g.mu.size());
    for (std::size_t j = 0; j < g.mu.size(); ++j) f(j) = static_cast<double>(g.mu[j]);
    return f;
}

}  // namespace detail

/// Latent-space search through the generator: fitness decodes z, gates the
/// image through the case filter (reject => infeasible), compresses to the
/// 16-dim feature and asks the objective surrogate. The true simulator runs
/// exactly once, on the recovered design, for verification. A diversity
/// probe over prior samples feeds the CDR before the search starts.
inline OptimizeOutput optimize_stage(const PipelineConfig& cfg, const Benchmark& bench,
                                     const ResVae<float>& generation,
                                     const ResVae<float>& reduction,
                                     const SurrogateBundle& surrogates,
                                     const filt::FilterConfig& filter) {
    namespace fs = std::filesystem;
    const fs::path root(cfg.out_dir);
    const int dz = generation.config().latent_dim;

    auto decode_z = [&](const std::vector<double>& z) {
        std::vector<float> zf(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) zf[i] = static_cast<float>(z[i]);
        return generation.decode(zf);
    };
    auto predict_objective = [&](const Image& img) {
        return svr::predict(surrogates.objective, detail::features_of(reduction, img));
    };

    // diversity probe: prior samples through decode -> filter -> surrogate
    Rng probe_rng = make_rng(cfg.seed, 0xCD12);
    std::vector<double> probe_objectives;
    long attempts = 0;
    const long max_attempts = 20L * cfg.cdr_min_cases;
    {
        // draw latent batches sequentially, decode/score in parallel
        const int chunk = 64;
        std::vector<std::vector<double>> zs(chunk, std::vector<double>(dz));
        std::vector<double> vals(chunk);
        std::vector<char> ok(chunk);
        std::normal_distribution<double> normal(0.0, 1.0);
        while (static_cast<long>(probe_objectives.size()) < cfg.cdr_min_cases &&
               attempts < max_attempts) {
            for (auto& z : zs)
                for (auto& v : z) v = normal(probe_rng);
            parallel_for(chunk, [&](std::size_t i) {
                Image img = decode_z(zs[i]);
                const auto d = filt::is_reasonable(img, filter);
                ok[i] = d.reasonable ? 1 : 0;
                vals[i] = d.reasonable ? predict_objective(img) : 0.0;
            });
            for (int i = 0; i < chunk; ++i)
                if (ok[i]) probe_objectives.push_back(vals[i]);
            attempts += chunk;
        }
    }
    if (static_cast<long>(probe_objectives.size()) < cfg.cdr_min_cases)
        throw std::runtime_error(
            "optimize: only " + std::to_string(probe_objectives.size()) + " of " +
            std::to_string(attempts) +
            " prior samples passed the case filter; filter threshold C = " +
            std::to_string(filter.threshold_c) + " looks miscalibrated");

    OptimizeOutput out;
    out.cdr_cases = static_cast<long>(probe_objectives.size());
    out.probe_acceptance = static_cast<double>(out.cdr_cases) / attempts;
    out.cdr = metrics::cdr(probe_objectives, surrogates.objective_min, surrogates.objective_max,
                           cfg.cdr_tol_mean, cfg.cdr_tol_var);

    // search the latent box
    pso::Problem problem;
    problem.dimension = dz;
    problem.lower.assign(dz, -cfg.latent_bound);
    problem.upper.assign(dz, cfg.latent_bound);
    problem.sense = bench.sense();
    problem.fitness = [&](const std::vector<double>& z) {
        Image img = decode_z(z);
        if (!filt::is_reasonable(img, filter).reasonable) return pso::kInfeasible;
        return predict_objective(img);
    };
    pso::ArpsoConfig acfg = cfg.arpso;
    acfg.seed = mix_seed(cfg.seed, 0xA590);
    out.search = pso::optimize(problem, cfg.iterations, acfg);
    if (out.search.infeasible_evals * 10 > out.search.evaluations * 9)
        throw std::runtime_error(
            "optimize: " + std::to_string(out.search.infeasible_evals) + " of " +
            std::to_string(out.search.evaluations) +
            " fitness evaluations were filtered out; the case filter (C = " +
            std::to_string(filter.threshold_c) + ") rejects nearly everything");

    out.best_z = out.search.best_position;
    out.predicted_objective = out.search.best_value;

    // recover the design through the parameter surrogates, then verify once
    Image best_img = decode_z(out.best_z);
    Eigen::VectorXd f_star = detail::features_of(reduction, best_img);
    out.alpha_star.resize(surrogates.parameters.size());
    for (std::size_t j = 0; j < surrogates.parameters.size(); ++j) {
        const double raw = svr::predict(surrogates.parameters[j], f_star);
        out.alpha_star[j] =
            std::clamp(raw, surrogates.design_bounds.lower[j], surrogates.design_bounds.upper[j]);
    }
    out.true_objective = bench.objective(out.alpha_star);

    io::write_png((root / "best_case.png").string(), best_img);
    io::write_png((root / "verified_case.png").string(),
                  bench.render(out.alpha_star, cfg.image_size));

    io::CsvWriter trace((root / "trace.csv").string());
    trace.write_row({"iteration", "gbest", "swarm_size"});
    for (const auto& h : out.search.history)
        trace.write_row({std::to_string(h.iteration), io::format_double(h.gbest),
                         std::to_string(h.swarm_size)});
    trace.close();

    out.report = {
        {"benchmark", bench.name()},
        {"seed", cfg.seed},
        {"iterations", cfg.iterations},
        {"latent_bound", cfg.latent_bound},
        {"filter_threshold_c", filter.threshold_c},
        {"cdr",
         {{"mean", out.cdr.mean},
          {"variance", out.cdr.variance},
          {"pass", out.cdr.pass},
          {"cases", out.cdr_cases},
          {"probe_acceptance", out.probe_acceptance}}},
        {"search",
         {{"evaluations", out.search.evaluations},
          {"infeasible_evaluations", out.search.infeasible_evals},
          {"final_swarm_size", out.search.history.back().swarm_size},
          {"best_z", out.best_z}}},
        {"optimum",
         {{"predicted_objective", out.predicted_objective},
          {"alpha_star", out.alpha_star},
          {"true_objective", out.true_objective}}}};
    std::ofstream os(root / "report.json", std::ios::binary | std::ios::trunc);
    os << out.report.dump(2) << "\n";
    return out;
}

}  // namespace grnea::pipe
