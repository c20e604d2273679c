#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "aapack/errors.hpp"
#include "aapack/game.hpp"
#include "aapack/matrix.hpp"
#include "aapack/numeric.hpp"

namespace aapack {

/// How a pack's summed expert losses are scaled before entering the weights.
///
///   fixed(K)      divide by a declared K; packs larger than K are rejected
///   running_max   divide all accumulated loss by the largest pack seen so far
///   current_pack  divide by the size of the pack just observed
struct DivisorPolicy {
    enum class Kind { fixed, running_max, current_pack };

    Kind kind = Kind::fixed;
    std::size_t k = 1;

    static DivisorPolicy fixed(std::size_t k) {
        if (k < 1) throw DomainError("divisor policy: fixed K must be >= 1");
        return {Kind::fixed, k};
    }
    static DivisorPolicy running_max() { return {Kind::running_max, 1}; }
    static DivisorPolicy current_pack() { return {Kind::current_pack, 1}; }

    bool operator==(const DivisorPolicy&) const = default;
};

/// Weight state shared by every aggregating learner.
///
/// Weights are kept in the log domain and unnormalized; `weights()` returns
/// the normalized probability vector. Cumulative expert losses are stored
/// separately so the running-max policy can rebuild weights from the prior.
struct AggregatorState {
    std::vector<double> prior;
    std::vector<double> log_weights;
    std::vector<double> cumulative_losses;
    std::size_t running_max_pack = 1;
    std::size_t trial_index = 0;

    std::size_t experts() const { return prior.size(); }
    std::vector<double> weights() const { return normalize_log_weights(log_weights); }

    bool operator==(const AggregatorState&) const = default;
};

inline std::vector<double> uniform_prior(std::size_t n) {
    if (n == 0) throw DomainError("prior: need at least one expert");
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

inline void validate_probability_vector(std::span<const double> p, const char* what) {
    if (p.empty()) throw DomainError(std::string(what) + ": empty");
    double s = 0.0;
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw DomainError(std::string(what) + ": entries must be nonnegative");
        s += x;
    }
    if (std::abs(s - 1.0) > kIdentityTol) throw DomainError(std::string(what) + ": must sum to 1");
}

inline AggregatorState init_state(std::span<const double> prior) {
    validate_probability_vector(prior, "prior");
    AggregatorState s;
    s.prior.assign(prior.begin(), prior.end());
    s.log_weights.resize(prior.size());
    for (std::size_t n = 0; n < prior.size(); ++n) s.log_weights[n] = std::log(prior[n]);
    s.cumulative_losses.assign(prior.size(), 0.0);
    return s;
}

/// Mixture of the experts' loss profiles under the current weights.
inline GeneralizedPrediction mixture(const AggregatorState& state,
                                     std::span<const double> expert_preds, const GameSpec& game) {
    if (expert_preds.size() != state.experts())
        throw DomainError("predict: expected " + std::to_string(state.experts()) +
                          " expert predictions, got " + std::to_string(expert_preds.size()));
    return GeneralizedPrediction(state.log_weights,
                                 std::vector<double>(expert_preds.begin(), expert_preds.end()), game);
}

/// Learner prediction for one item. The state is not modified: every item of
/// a pack is predicted from the same weights.
inline double predict_item(const AggregatorState& state, std::span<const double> expert_preds,
                           const GameSpec& game) {
    return mixture(state, expert_preds, game).substitute();
}

/// Per-expert sums of a pack's loss matrix (rows are items, columns experts).
inline std::vector<double> pack_loss_sums(const Matrix& losses) {
    std::vector<double> sums(losses.cols(), 0.0);
    for (std::size_t k = 0; k < losses.rows(); ++k)
        for (std::size_t n = 0; n < losses.cols(); ++n) sums[n] += losses(k, n);
    return sums;
}

/// Fold one pack of expert losses into the state.
///
/// `expert_losses` has one row per item and one column per expert; entries
/// are nonnegative and may be +inf.
inline AggregatorState observe_pack(AggregatorState state, const Matrix& expert_losses,
                                    DivisorPolicy policy, const GameSpec& game) {
    const std::size_t pack_size = expert_losses.rows();
    if (pack_size == 0) throw DomainError("observe_pack: empty pack");
    if (expert_losses.cols() != state.experts())
        throw DomainError("observe_pack: loss matrix has wrong number of experts");
    for (double x : expert_losses.data())
        if (!(x >= 0.0)) throw DomainError("observe_pack: losses must be nonnegative");
    if (policy.kind == DivisorPolicy::Kind::fixed && pack_size > policy.k)
        throw DomainError("observe_pack: pack of size " + std::to_string(pack_size) +
                          " exceeds declared maximum " + std::to_string(policy.k));

    const std::vector<double> sums = pack_loss_sums(expert_losses);
    for (std::size_t n = 0; n < sums.size(); ++n) state.cumulative_losses[n] += sums[n];
    state.running_max_pack = std::max(state.running_max_pack, pack_size);

    switch (policy.kind) {
        case DivisorPolicy::Kind::fixed:
        case DivisorPolicy::Kind::current_pack: {
            const double divisor = policy.kind == DivisorPolicy::Kind::fixed
                                       ? static_cast<double>(policy.k)
                                       : static_cast<double>(pack_size);
            for (std::size_t n = 0; n < sums.size(); ++n)
                state.log_weights[n] -= game.eta * sums[n] / divisor;
            break;
        }
        case DivisorPolicy::Kind::running_max: {
            const double divisor = static_cast<double>(state.running_max_pack);
            for (std::size_t n = 0; n < sums.size(); ++n)
                state.log_weights[n] =
                    std::log(state.prior[n]) - game.eta * state.cumulative_losses[n] / divisor;
            break;
        }
    }
    ++state.trial_index;

    if (!std::isfinite(log_sum_exp(state.log_weights)))
        throw ArithmeticError("observe_pack: every expert weight vanished");
    return state;
}

}  // namespace aapack
