#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aapack/errors.hpp"
#include "aapack/numeric.hpp"

namespace aapack {

/// Largest learning rate at which the square-loss game on [lower, upper] is
/// mixable with constant 1: 2 / (upper - lower)^2.
inline double max_mixable_eta(double lower, double upper) {
    if (!(lower < upper)) throw DomainError("max_mixable_eta: need lower < upper");
    const double w = upper - lower;
    return 2.0 / (w * w);
}

/// Square-loss game on the interval [lower, upper] (outcomes and predictions
/// share the interval), played at learning rate `eta` with admissible
/// constant `c_admissible`.
///
/// `loss_scale` multiplies the loss; the default 1 is the plain square loss.
/// A scaled game at rate eta has the same substitutions as the unscaled game
/// at rate loss_scale * eta.
struct GameSpec {
    double lower = 0.0;
    double upper = 1.0;
    double eta = 2.0;
    double c_admissible = 1.0;
    double loss_scale = 1.0;

    /// The mixable configuration: eta = 2/(B-A)^2, C = 1.
    static GameSpec square(double lower, double upper) {
        GameSpec g{lower, upper, max_mixable_eta(lower, upper), 1.0, 1.0};
        return g;
    }

    void validate() const {
        if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper))
            throw DomainError("game: need finite lower < upper");
        if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("game: eta must be positive");
        if (!(c_admissible >= 1.0) || !std::isfinite(c_admissible))
            throw DomainError("game: admissible constant must be >= 1");
        if (!(loss_scale > 0.0) || !std::isfinite(loss_scale))
            throw DomainError("game: loss scale must be positive");
    }

    double width() const { return upper - lower; }
    double midpoint() const { return 0.5 * (lower + upper); }
    bool contains(double x) const { return x >= lower && x <= upper; }
    double clip(double x) const { return std::min(upper, std::max(lower, x)); }

    /// Learning rate as seen by the unscaled square loss.
    double base_rate() const { return eta * loss_scale; }

    /// True when (eta, C = 1) is admissible without appealing to a larger C.
    bool within_mixable_rate() const { return base_rate() <= max_mixable_eta(lower, upper); }

    double loss(double gamma, double omega) const {
        if (!contains(gamma) || !contains(omega))
            throw DomainError("square loss: argument outside [" + std::to_string(lower) + ", " +
                              std::to_string(upper) + "]");
        const double d = gamma - omega;
        return loss_scale * d * d;
    }

    bool operator==(const GameSpec&) const = default;
};

/// (gamma - omega)^2 scaled by the game's loss scale; both arguments must lie
/// in [A, B].
inline double square_loss(double gamma, double omega, const GameSpec& game) {
    return game.loss(gamma, omega);
}

/// Generalized prediction
///   g(omega) = -(C/eta) ln sum_n p^n exp(-eta * loss(gamma^n, omega))
/// held as normalized log-weights plus the expert predictions that induce it.
class GeneralizedPrediction {
public:
    /// `log_weights` need not be normalized; at least one entry must be finite.
    GeneralizedPrediction(std::vector<double> log_weights, std::vector<double> expert_preds,
                          const GameSpec& game)
        : log_p_(std::move(log_weights)), preds_(std::move(expert_preds)), game_(game) {
        game_.validate();
        if (preds_.empty()) throw DomainError("generalized prediction: no experts");
        if (preds_.size() != log_p_.size())
            throw DomainError("generalized prediction: weight/prediction length mismatch");
        for (double x : preds_)
            if (!game_.contains(x))
                throw DomainError("generalized prediction: expert prediction outside [A, B]");
        const double z = log_sum_exp(log_p_);
        if (!std::isfinite(z)) throw ArithmeticError("generalized prediction: weights cannot be normalized");
        for (double& lp : log_p_) lp -= z;
    }

    /// Build from a probability vector; it must be nonnegative and sum to 1
    /// within 1e-12.
    static GeneralizedPrediction from_weights(std::span<const double> weights,
                                              std::span<const double> expert_preds,
                                              const GameSpec& game) {
        if (expert_preds.empty()) throw DomainError("generalized prediction: no experts");
        if (weights.size() != expert_preds.size())
            throw DomainError("generalized prediction: weight/prediction length mismatch");
        double s = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("weights must be nonnegative");
            s += w;
        }
        if (std::abs(s - 1.0) > kIdentityTol) throw DomainError("weights must sum to 1");
        std::vector<double> lw(weights.size());
        for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = std::log(weights[i]);
        return GeneralizedPrediction(std::move(lw),
                                     std::vector<double>(expert_preds.begin(), expert_preds.end()),
                                     game);
    }

    double operator()(double omega) const { return mixed(omega, game_.eta, game_.loss_scale) * game_.c_admissible; }

    /// A prediction gamma in [A, B] with loss(gamma, w) <= g(w) for every
    /// outcome w.
    ///
    /// Closed form for the square loss:
    ///   gamma = (A+B)/2 + (h(A) - h(B)) / (2 (B-A)),
    /// where h is the generalized prediction expressed in unscaled square-loss
    /// units with C = 1. Rates above 2/(B-A)^2 fall back to that maximal rate,
    /// which is valid whenever C >= eta * loss_scale * (B-A)^2 / 2.
    double substitute() const {
        if (const auto u = unanimous()) return *u;
        const double a = game_.loss_scale;
        double h_lower = 0.0;
        double h_upper = 0.0;
        if (game_.within_mixable_rate()) {
            h_lower = mixed(game_.lower, game_.eta, a) / a;
            h_upper = mixed(game_.upper, game_.eta, a) / a;
        } else {
            const double rate = max_mixable_eta(game_.lower, game_.upper);
            h_lower = mixed(game_.lower, rate, 1.0);
            h_upper = mixed(game_.upper, rate, 1.0);
        }
        return game_.clip(game_.midpoint() + (h_lower - h_upper) / (2.0 * game_.width()));
    }

    std::size_t size() const { return preds_.size(); }
    const std::vector<double>& log_weights() const { return log_p_; }
    const std::vector<double>& expert_predictions() const { return preds_; }
    const GameSpec& game() const { return game_; }

private:
    // -(1/rate) ln sum_n p^n exp(-rate * scale * (gamma^n - omega)^2)
    double mixed(double omega, double rate, double scale) const {
        std::vector<double> terms(preds_.size());
        for (std::size_t n = 0; n < preds_.size(); ++n) {
            const double d = preds_[n] - omega;
            terms[n] = log_p_[n] - rate * scale * d * d;
        }
        return -log_sum_exp(terms) / rate;
    }

    // All experts with positive weight agree: their prediction is an exact
    // substitution (g coincides with its loss profile).
    std::optional<double> unanimous() const {
        std::optional<double> v;
        for (std::size_t n = 0; n < preds_.size(); ++n) {
            if (log_p_[n] == -kInf) continue;
            if (v && *v != preds_[n]) return std::nullopt;
            v = preds_[n];
        }
        return v;
    }

    std::vector<double> log_p_;
    std::vector<double> preds_;
    GameSpec game_;
};

inline double generalized_prediction(std::span<const double> weights,
                                     std::span<const double> expert_preds, const GameSpec& game,
                                     double omega) {
    if (!game.contains(omega)) throw DomainError("generalized prediction: outcome outside [A, B]");
    return GeneralizedPrediction::from_weights(weights, expert_preds, game)(omega);
}

inline double substitute(std::span<const double> weights, std::span<const double> expert_preds,
                         const GameSpec& game) {
    return GeneralizedPrediction::from_weights(weights, expert_preds, game).substitute();
}

/// max over a uniform grid on [A, B] of loss(gamma, w) - g(w). Values <= 1e-12
/// mean gamma is a valid substitution on that grid.
inline double check_substitution_validity(double gamma, const GeneralizedPrediction& g,
                                          std::size_t grid_size) {
    if (grid_size < 2) throw DomainError("validity check: grid_size must be >= 2");
    const GameSpec& game = g.game();
    if (!game.contains(gamma)) throw DomainError("validity check: gamma outside [A, B]");
    double worst = -kInf;
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(grid_size - 1);
        const double omega = i + 1 == grid_size ? game.upper : game.lower + t * game.width();
        worst = std::max(worst, game.loss(gamma, omega) - g(omega));
    }
    return worst;
}

inline double check_substitution_validity(double gamma, std::span<const double> weights,
                                          std::span<const double> expert_preds,
                                          const GameSpec& game, std::size_t grid_size = 1001) {
    return check_substitution_validity(
        gamma, GeneralizedPrediction::from_weights(weights, expert_preds, game), grid_size);
}

}  // namespace aapack
