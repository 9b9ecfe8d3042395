#pragma once

#include <memory>
#include <string>
#include <vector>

#include "grnea/bench/fiber.hpp"
#include "grnea/bench/strain.hpp"
#include "grnea/opt/arpso.hpp"

namespace grnea::pipe {

/// Uniform view over the analytic benchmarks the pipeline can drive. The
/// "true" objective here is the expensive-simulation stand-in; it is called
/// for dataset generation and once for final verification, never inside the
/// optimizer's fitness loop.
class Benchmark {
public:
    virtual ~Benchmark() = default;
    virtual std::string name() const = 0;
    virtual bench::Bounds bounds() const = 0;
    virtual std::vector<std::string> param_names() const = 0;
    virtual std::vector<double> reference_design() const = 0;  // the filter's standard case
    virtual pso::Problem::Sense sense() const = 0;
    virtual Image render(const std::vector<double>& alpha, int resolution) const = 0;
    virtual double objective(const std::vector<double>& alpha) const = 0;
    virtual std::vector<std::pair<std::string, double>> extra_responses(
        const std::vector<double>& alpha) const = 0;
    virtual std::pair<std::vector<double>, double> grid_oracle(int points_per_dim) const = 0;
};

class FiberPlate final : public Benchmark {
public:
    std::string name() const override { return "fiber"; }
    bench::Bounds bounds() const override { return b_.bounds(); }
    std::vector<std::string> param_names() const override { return {"a1", "a2", "a3", "a4"}; }
    std::vector<double> reference_design() const override { return b_.midpoint(); }
    pso::Problem::Sense sense() const override { return pso::Problem::Sense::minimize; }
    Image render(const std::vector<double>& alpha, int resolution) const override {
        return bench::fiber_render(b_, alpha, resolution);
    }
    double objective(const std::vector<double>& alpha) const override {
        return bench::fiber_true_objective(b_, alpha);
    }
    std::vector<std::pair<std::string, double>> extra_responses(
        const std::vector<double>&) const override {
        return {};
    }
    std::pair<std::vector<double>, double> grid_oracle(int points_per_dim) const override {
        return bench::fiber_grid_oracle(b_, points_per_dim);
    }

private:
    bench::FiberBenchmark b_;
};

class SheetForming final : public Benchmark {
public:
    std::string name() const override { return "strain"; }
    bench::Bounds bounds() const override { return b_.bounds(); }
    std::vector<std::string> param_names() const override {
        return {"friction_punch", "friction_binder", "draw_speed", "bhf", "drawbead"};
    }
    std::vector<double> reference_design() const override { return b_.feasible_reference(); }
    pso::Problem::Sense sense() const override { return pso::Problem::Sense::maximize; }
    Image render(const std::vector<double>& alpha, int resolution) const override {
        return bench::strain_render(b_, alpha, resolution);
    }
    double objective(const std::vector<double>& alpha) const override {
        return bench::strain_true_objective(b_, alpha);
    }
    std::vector<std::pair<std::string, double>> extra_responses(
        const std::vector<double>& alpha) const override {
        const auto r = bench::fld_evaluate(b_.strain_field(alpha));
        return {{"red_pct", r.red_pct},
                {"green_pct", r.green_pct},
                {"wrinkle_pct", r.wrinkle_pct},
                {"y_p", r.y_p},
                {"y_q", r.y_q}};
    }
    std::pair<std::vector<double>, double> grid_oracle(int points_per_dim) const override {
        return bench::strain_grid_oracle(b_, points_per_dim);
    }

private:
    bench::StrainBenchmark b_;
};

inline std::unique_ptr<Benchmark> make_benchmark(const std::string& name) {
    if (name == "fiber") return std::make_unique<FiberPlate>();
    if (name == "strain") return std::make_unique<SheetForming>();
    throw std::invalid_argument("unknown benchmark '" + name + "'");
}

}  // namespace grnea::pipe
