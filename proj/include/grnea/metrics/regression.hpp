#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace grnea::metrics {

namespace detail {

inline void check_pair(const std::vector<double>& actual, const std::vector<double>& predicted) {
    if (actual.size() != predicted.size())
        throw std::invalid_argument("regression metrics: size mismatch");
    if (actual.size() < 2) throw std::invalid_argument("regression metrics: need n >= 2");
}

inline double population_std(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

/// Numerically-constant responses; relative gate so rounding noise from
/// vectorized accumulation cannot slip a near-zero spread through.
inline bool degenerate_spread(const std::vector<double>& v, double spread) {
    double scale = 1.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    return !(spread > 1e-12 * scale);
}

}  // namespace detail

/// R^2 = 1 - SS_res / SS_tot.
inline double r_squared(const std::vector<double>& actual, const std::vector<double>& predicted) {
    detail::check_pair(actual, predicted);
    double mean = 0.0;
    for (double x : actual) mean += x;
    mean /= static_cast<double>(actual.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
    }
    if (detail::degenerate_spread(actual, std::sqrt(ss_tot / actual.size())))
        throw std::invalid_argument("r_squared: constant actual responses");
    return 1.0 - ss_res / ss_tot;
}

/// Relative average absolute error: sum |err| / (n * STD of actuals).
inline double raae(const std::vector<double>& actual, const std::vector<double>& predicted) {
    detail::check_pair(actual, predicted);
    const double std_dev = detail::population_std(actual);
    if (detail::degenerate_spread(actual, std_dev))
        throw std::invalid_argument("raae: constant actual responses");
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) acc += std::abs(actual[i] - predicted[i]);
    return acc / (static_cast<double>(actual.size()) * std_dev);
}

/// Relative maximum absolute error: max |err| / STD of actuals.
inline double rmae(const std::vector<double>& actual, const std::vector<double>& predicted) {
    detail::check_pair(actual, predicted);
    const double std_dev = detail::population_std(actual);
    if (detail::degenerate_spread(actual, std_dev))
        throw std::invalid_argument("rmae: constant actual responses");
    double worst = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i)
        worst = std::max(worst, std::abs(actual[i] - predicted[i]));
    return worst / std_dev;
}

}  // namespace grnea::metrics
