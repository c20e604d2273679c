#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace aapack {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Tolerances shared by the library and its tests.
inline constexpr double kIdentityTol = 1e-12;   // algebraic identities
inline constexpr double kAccumTol = 1e-9;       // accumulated sums, bound slack

// ln(sum(exp(x))) with -inf entries contributing exactly zero.
// Returns -inf when every entry is -inf (or the input is empty).
inline double log_sum_exp(std::span<const double> xs) {
    double top = -kInf;
    for (double x : xs) top = std::max(top, x);
    if (top == -kInf) return -kInf;
    if (top == kInf) return kInf;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - top);
    return top + std::log(acc);
}

// exp(log_weights) normalized to a probability vector.
inline std::vector<double> normalize_log_weights(std::span<const double> log_weights) {
    const double z = log_sum_exp(log_weights);
    std::vector<double> p(log_weights.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(log_weights[i] - z);
    return p;
}

inline double sum(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
}

}  // namespace aapack
