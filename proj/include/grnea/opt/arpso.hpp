#pragma once

#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <vector>

#include "grnea/core/rng.hpp"
#include "grnea/core/threading.hpp"

namespace grnea::pso {

/// Fitness may return this (or any non-finite value) to mark a position
/// infeasible; such positions never become personal or global bests.
constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct Problem {
    enum class Sense { minimize, maximize };

    int dimension = 0;
    std::vector<double> lower, upper;
    Sense sense = Sense::minimize;
    std::function<double(const std::vector<double>&)> fitness;

    void validate() const {
        if (dimension < 1 || static_cast<int>(lower.size()) != dimension ||
            static_cast<int>(upper.size()) != dimension)
            throw std::invalid_argument("arpso: inconsistent problem dimension");
        for (int d = 0; d < dimension; ++d)
            if (!std::isfinite(lower[d]) || !std::isfinite(upper[d]) || !(lower[d] < upper[d]))
                throw std::invalid_argument("arpso: bounds must be finite with lower < upper");
        if (!fitness) throw std::invalid_argument("arpso: missing fitness");
    }
};

struct ArpsoConfig {
    int swarm_size = 10;  // the deliberately small initial population
    int m_add = 4;        // particles appended per step over the add horizon
    int add_horizon = 10;
    double reset_fraction = 0.10;
    double inertia = 0.729;
    double cognitive = 1.49445;
    double social = 1.49445;
    std::uint64_t seed = 1;
};

struct Particle {
    std::vector<double> position, velocity;
    std::vector<double> best_position;
    double best_value = kInfeasible;  // internal (minimization) scale
};

struct SwarmState {
    std::vector<Particle> particles;
    std::vector<double> gbest_position;
    double gbest_value = kInfeasible;  // internal scale
    long iteration = 0;
    ArpsoConfig cfg;
    Rng rng;
    long evaluations = 0;
    long infeasible_evals = 0;
};

struct HistoryEntry {
    long iteration;
    double gbest;  // in the problem's own sense
    int swarm_size;
};

struct Result {
    std::vector<double> best_position;
    double best_value = 0.0;  // in the problem's own sense
    std::vector<HistoryEntry> history;
    long evaluations = 0;
    long infeasible_evals = 0;
};

namespace detail {

/// Internal values always minimize; maximization is run on the negated
/// fitness so both senses follow identical trajectories under one seed.
/// kInfeasible is the sanctioned reject sentinel in either sense; any other
/// non-finite value is unexpected and warned about.
inline double internal_value(const Problem& p, double raw, long& infeasible_count) {
    if (!std::isfinite(raw)) {
        ++infeasible_count;
        if (raw != kInfeasible && infeasible_count <= 3)
            std::cerr << "arpso: non-finite fitness treated as infeasible\n";
        return kInfeasible;
    }
    return p.sense == Problem::Sense::maximize ? -raw : raw;
}

inline void random_particle(const Problem& p, Rng& rng, Particle& out) {
    out.position.resize(p.dimension);
    out.velocity.resize(p.dimension);
    for (int d = 0; d < p.dimension; ++d) {
        const double range = p.upper[d] - p.lower[d];
        out.position[d] = uniform(rng, p.lower[d], p.upper[d]);
        out.velocity[d] = uniform(rng, -range / 2.0, range / 2.0);
    }
    out.best_position = out.position;
    out.best_value = kInfeasible;
}

/// Evaluate every particle (concurrently; fitness must be pure) and fold the
/// results into pbest/gbest in particle order.
inline void evaluate_all(SwarmState& st, const Problem& p) {
    std::vector<double> raw(st.particles.size());
    parallel_for(st.particles.size(),
                 [&](std::size_t i) { raw[i] = p.fitness(st.particles[i].position); });
    st.evaluations += static_cast<long>(st.particles.size());
    for (std::size_t i = 0; i < st.particles.size(); ++i) {
        const double v = internal_value(p, raw[i], st.infeasible_evals);
        Particle& part = st.particles[i];
        if (v < part.best_value) {
            part.best_value = v;
            part.best_position = part.position;
        }
        if (v < st.gbest_value) {
            st.gbest_value = v;
            st.gbest_position = part.position;
        }
    }
}

}  // namespace detail

/// Uniform random swarm with evaluated bests. Retries a bounded number of
/// times if every initial particle is infeasible.
inline SwarmState init_swarm(const Problem& problem, int m0, std::uint64_t seed,
                             ArpsoConfig cfg = {}) {
    problem.validate();
    if (m0 < 2) throw std::invalid_argument("arpso: initial swarm must have >= 2 particles");
    cfg.swarm_size = m0;
    cfg.seed = seed;
    for (int attempt = 0; attempt < 20; ++attempt) {
        SwarmState st;
        st.cfg = cfg;
        st.rng = make_rng(seed, 0xA4950 + attempt);
        st.particles.resize(m0);
        for (auto& part : st.particles) detail::random_particle(problem, st.rng, part);
        detail::evaluate_all(st, problem);
        if (st.gbest_value < kInfeasible) return st;
    }
    throw std::runtime_error("arpso: all initial particles infeasible after 20 retries");
}

/// One ARPSO iteration: evaluate and update bests, move the swarm, reset
/// int(reset_fraction * m) random particles, then append m_add random
/// particles while within the add horizon.
inline void step(SwarmState& st, const Problem& problem) {
    detail::evaluate_all(st, problem);

    const auto& cfg = st.cfg;
    for (auto& part : st.particles) {
        for (int d = 0; d < problem.dimension; ++d) {
            const double r1 = uniform(st.rng);
            const double r2 = uniform(st.rng);
            const double pbest_d =
                part.best_value < kInfeasible ? part.best_position[d] : part.position[d];
            const double gbest_d =
                st.gbest_value < kInfeasible ? st.gbest_position[d] : part.position[d];
            part.velocity[d] = cfg.inertia * part.velocity[d] +
                               cfg.cognitive * r1 * (pbest_d - part.position[d]) +
                               cfg.social * r2 * (gbest_d - part.position[d]);
            part.position[d] += part.velocity[d];
            if (part.position[d] < problem.lower[d]) {
                part.position[d] = problem.lower[d];
                part.velocity[d] = 0.0;
            } else if (part.position[d] > problem.upper[d]) {
                part.position[d] = problem.upper[d];
                part.velocity[d] = 0.0;
            }
        }
    }

    const int m = static_cast<int>(st.particles.size());
    const int resets = static_cast<int>(cfg.reset_fraction * m);
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    for (int j = 0; j < resets; ++j) {
        std::uniform_int_distribution<int> pick(j, m - 1);
        std::swap(idx[j], idx[pick(st.rng)]);
        detail::random_particle(problem, st.rng, st.particles[idx[j]]);
    }

    st.iteration += 1;
    if (st.iteration <= cfg.add_horizon) {
        for (int k = 0; k < cfg.m_add; ++k) {
            Particle fresh;
            detail::random_particle(problem, st.rng, fresh);
            st.particles.push_back(std::move(fresh));
        }
    }
}

inline double to_raw(const Problem& p, double internal) {
    return p.sense == Problem::Sense::maximize ? -internal : internal;
}

/// Full run: `iterations` steps plus a closing evaluation sweep so the last
/// moves count. History records (iteration, gbest, swarm size) per step.
inline Result optimize(const Problem& problem, int iterations, const ArpsoConfig& cfg) {
    if (iterations < 1) throw std::invalid_argument("arpso: iterations must be >= 1");
    SwarmState st = init_swarm(problem, cfg.swarm_size, cfg.seed, cfg);
    Result res;
    res.history.push_back({0, to_raw(problem, st.gbest_value), static_cast<int>(st.particles.size())});
    for (int it = 0; it < iterations; ++it) {
        step(st, problem);
        res.history.push_back(
            {st.iteration, to_raw(problem, st.gbest_value), static_cast<int>(st.particles.size())});
    }
    detail::evaluate_all(st, problem);
    res.history.push_back(
        {st.iteration + 1, to_raw(problem, st.gbest_value), static_cast<int>(st.particles.size())});
    res.best_position = st.gbest_position;
    res.best_value = to_raw(problem, st.gbest_value);
    res.evaluations = st.evaluations;
    res.infeasible_evals = st.infeasible_evals;
    return res;
}

}  // namespace grnea::pso
