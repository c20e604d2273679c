#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>

#include "aapack/aap.hpp"
#include "aapack/errors.hpp"

namespace aapack {

/// Desk-scale stand-in for a real dataset: outcomes uniform on [0, 1], one
/// "current best" expert that sees the outcome up to Gaussian noise, and the
/// others off by a fixed per-expert distance (reflected to stay inside
/// [0, 1]). With `drift_period` > 0 the best expert advances by one every
/// `drift_period` packs; otherwise expert 0 is always best.
struct SyntheticConfig {
    std::size_t experts = 3;
    std::size_t trials = 50;
    std::size_t min_pack = 1;
    std::size_t max_pack = 7;
    std::size_t drift_period = 0;
    double noise = 0.05;
    std::uint64_t seed = 0;

    void validate() const {
        if (experts < 1) throw DomainError("synthetic: need at least one expert");
        if (min_pack < 1 || max_pack < min_pack) throw DomainError("synthetic: need 1 <= min_pack <= max_pack");
        if (!(noise >= 0.0)) throw DomainError("synthetic: noise must be nonnegative");
    }
};

/// Index of the expert built to be best on (0-based) pack `t`.
inline std::size_t synthetic_best_expert(const SyntheticConfig& cfg, std::size_t t) {
    return cfg.drift_period == 0 ? 0 : (t / cfg.drift_period) % cfg.experts;
}

/// Error distance of expert `n` when it is not the best one.
inline double synthetic_offset(const SyntheticConfig& cfg, std::size_t n) {
    return 0.1 + 0.3 * static_cast<double>(n + 1) / static_cast<double>(cfg.experts + 1);
}

inline PackStream generate_synthetic_stream(const SyntheticConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pack_size(cfg.min_pack, cfg.max_pack);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto clip01 = [](double x) { return std::clamp(x, 0.0, 1.0); };

    PackStream s;
    s.experts = cfg.experts;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        Pack p;
        p.label = "t" + std::to_string(t + 1);
        p.predictions = Matrix(0, cfg.experts);
        const std::size_t k = pack_size(rng);
        const std::size_t best = synthetic_best_expert(cfg, t);
        std::vector<double> row(cfg.experts);
        for (std::size_t i = 0; i < k; ++i) {
            const double omega = unit(rng);
            for (std::size_t n = 0; n < cfg.experts; ++n) {
                const double eps = cfg.noise > 0.0 ? cfg.noise * gauss(rng) : 0.0;
                double pred = omega;
                if (n != best) {
                    const double d = synthetic_offset(cfg, n);
                    pred = omega + d <= 1.0 ? omega + d : omega - d;
                }
                row[n] = clip01(pred + eps);
            }
            p.predictions.append_row(row);
            p.outcomes.push_back(omega);
        }
        s.packs.push_back(std::move(p));
    }
    return s;
}

}  // namespace aapack
