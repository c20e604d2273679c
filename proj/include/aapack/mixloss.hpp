#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "aapack/aggregator.hpp"
#include "aapack/errors.hpp"
#include "aapack/matrix.hpp"
#include "aapack/numeric.hpp"

namespace aapack::mixloss {

/// One probability vector over the experts per item of a pack.
using Distributions = std::vector<std::vector<double>>;

inline void validate_distributions(const Distributions& dists, std::size_t experts,
                                   const std::string& who) {
    for (std::size_t k = 0; k < dists.size(); ++k) {
        if (dists[k].size() != experts)
            throw DomainError(who + ": distribution " + std::to_string(k + 1) + " has " +
                              std::to_string(dists[k].size()) + " entries, expected " +
                              std::to_string(experts));
        validate_probability_vector(dists[k], (who + ": distribution " + std::to_string(k + 1)).c_str());
    }
}

/// Pack mix loss  -sum_k ln sum_n p^n_k exp(-l^n_k).
///
/// `losses` is item-major (row k, column n) with entries in (-inf, +inf].
/// The result is +inf when some item puts all its mass on infinite losses.
inline double mix_loss(const Distributions& dists, const Matrix& losses) {
    if (losses.rows() != dists.size())
        throw DomainError("mix_loss: loss matrix rows must match the number of distributions");
    double total = 0.0;
    for (std::size_t k = 0; k < dists.size(); ++k) {
        if (dists[k].size() != losses.cols())
            throw DomainError("mix_loss: distribution length must match the number of experts");
        std::vector<double> terms(losses.cols());
        for (std::size_t n = 0; n < losses.cols(); ++n) {
            const double l = losses(k, n);
            if (std::isnan(l) || l == -kInf) throw DomainError("mix_loss: losses must lie in (-inf, +inf]");
            terms[n] = std::log(dists[k][n]) - l;
        }
        total -= log_sum_exp(terms);
    }
    return total;
}

/// Lowest-indexed expert n with prod_k p^n_k <= 1/N^K (compared as sums of
/// logs, with 1e-12 slack). Such an expert always exists by the AM-GM
/// inequality; failing to find one means the input was not normalized.
inline std::size_t find_low_product_expert(const Distributions& dists) {
    if (dists.empty()) throw DomainError("find_low_product_expert: no distributions");
    const std::size_t n_experts = dists.front().size();
    validate_distributions(dists, n_experts, "find_low_product_expert");
    const double threshold = -static_cast<double>(dists.size()) * std::log(static_cast<double>(n_experts));
    for (std::size_t n = 0; n < n_experts; ++n) {
        double log_prod = 0.0;
        for (const auto& d : dists) log_prod += std::log(d[n]);
        if (log_prod <= threshold + kIdentityTol) return n;
    }
    throw ArithmeticError("find_low_product_expert: no expert satisfies the product bound");
}

/// Nature's reply: zero loss for the low-product expert, +inf for everyone
/// else, on every item. Forces a pack regret of at least K ln N.
inline Matrix adversary_nature(const Distributions& dists) {
    const std::size_t n0 = find_low_product_expert(dists);
    Matrix m(dists.size(), dists.front().size(), kInf);
    for (std::size_t k = 0; k < dists.size(); ++k) m(k, n0) = 0.0;
    return m;
}

class Learner {
public:
    virtual ~Learner() = default;
    virtual std::string name() const = 0;
    virtual std::size_t experts() const = 0;
    virtual Distributions predict(std::size_t pack_size) = 0;
    virtual void observe(const Matrix& losses) = 0;
};

class Nature {
public:
    virtual ~Nature() = default;
    virtual std::string name() const = 0;
    virtual Matrix losses(const Distributions& learner_dists) = 0;
};

class UniformLearner final : public Learner {
public:
    explicit UniformLearner(std::size_t experts) : n_(experts) {
        if (n_ == 0) throw DomainError("uniform learner: need at least one expert");
    }
    std::string name() const override { return "uniform"; }
    std::size_t experts() const override { return n_; }
    Distributions predict(std::size_t pack_size) override {
        return Distributions(pack_size, uniform_prior(n_));
    }
    void observe(const Matrix&) override {}

private:
    std::size_t n_;
};

/// Weights proportional to p^n exp(-L^n / D), the same vector repeated for
/// every item of a pack. D = 1 by default; with `pack_scaled` D is the largest
/// pack seen so far, the mix-loss analogue of AAP-incremental. Once every
/// expert has infinite loss the prior is emitted.
class ExponentialWeightsLearner final : public Learner {
public:
    explicit ExponentialWeightsLearner(std::size_t experts, bool pack_scaled = false)
        : ExponentialWeightsLearner(uniform_prior(experts), pack_scaled) {}
    ExponentialWeightsLearner(std::vector<double> prior, bool pack_scaled)
        : prior_(std::move(prior)), losses_(prior_.size(), 0.0), pack_scaled_(pack_scaled) {
        validate_probability_vector(prior_, "exponential weights prior");
    }

    std::string name() const override { return pack_scaled_ ? "exp-weights-incremental" : "exp-weights"; }
    std::size_t experts() const override { return prior_.size(); }

    Distributions predict(std::size_t pack_size) override {
        std::vector<double> lw(prior_.size());
        const double d = pack_scaled_ ? static_cast<double>(max_pack_) : 1.0;
        for (std::size_t n = 0; n < lw.size(); ++n) lw[n] = std::log(prior_[n]) - losses_[n] / d;
        // Every expert infinitely bad: nothing separates them, restart from the prior.
        if (log_sum_exp(lw) == -kInf) return Distributions(pack_size, prior_);
        return Distributions(pack_size, normalize_log_weights(lw));
    }

    void observe(const Matrix& losses) override {
        max_pack_ = std::max(max_pack_, losses.rows());
        for (std::size_t k = 0; k < losses.rows(); ++k)
            for (std::size_t n = 0; n < losses.cols(); ++n) losses_[n] += losses(k, n);
    }

private:
    std::vector<double> prior_;
    std::vector<double> losses_;
    std::size_t max_pack_ = 1;
    bool pack_scaled_;
};

class AdversaryNature final : public Nature {
public:
    std::string name() const override { return "adversary"; }
    Matrix losses(const Distributions& d) override { return adversary_nature(d); }
};

class ZeroNature final : public Nature {
public:
    explicit ZeroNature(std::size_t experts) : n_(experts) {}
    std::string name() const override { return "zero"; }
    Matrix losses(const Distributions& d) override { return Matrix(d.size(), n_, 0.0); }

private:
    std::size_t n_;
};

struct MixLossTrial {
    std::size_t pack_size = 0;
    Distributions learner_distributions;
    Matrix nature_losses;
    double learner_loss = 0.0;
    std::vector<double> expert_pack_losses;

    /// learner_loss - min_n expert_pack_losses[n]
    double regret_increment() const {
        double best = kInf;
        for (double l : expert_pack_losses) best = std::min(best, l);
        return learner_loss - best;
    }

    bool operator==(const MixLossTrial&) const = default;
};

struct MixLossGame {
    std::string learner;
    std::string nature;
    std::size_t experts = 0;
    std::vector<MixLossTrial> trials;
    double total_loss = 0.0;
    std::vector<double> expert_losses;
    /// total_loss - min_n expert_losses[n]; +inf whenever the learner's total
    /// loss is infinite.
    double regret = 0.0;

    bool operator==(const MixLossGame&) const = default;
};

inline double regret_of(double learner_total, std::span<const double> expert_totals) {
    if (learner_total == kInf) return kInf;
    double best = kInf;
    for (double l : expert_totals) best = std::min(best, l);
    return learner_total - best;
}

/// Play the pack mix-loss protocol: nature announces K_t, the learner emits
/// K_t distributions, nature (seeing them) announces losses.
inline MixLossGame run_mixloss_game(Learner& learner, Nature& nature,
                                    std::span<const std::size_t> pack_sizes) {
    MixLossGame g;
    g.learner = learner.name();
    g.nature = nature.name();
    g.experts = learner.experts();
    g.expert_losses.assign(g.experts, 0.0);
    for (std::size_t t = 0; t < pack_sizes.size(); ++t) {
        const std::size_t k = pack_sizes[t];
        if (k < 1) throw DomainError("mix-loss game: pack sizes must be >= 1");
        MixLossTrial trial;
        trial.pack_size = k;
        trial.learner_distributions = learner.predict(k);
        if (trial.learner_distributions.size() != k)
            throw DomainError("learner '" + g.learner + "' emitted " +
                              std::to_string(trial.learner_distributions.size()) +
                              " distributions for a pack of " + std::to_string(k));
        validate_distributions(trial.learner_distributions, g.experts, "learner '" + g.learner + "'");
        trial.nature_losses = nature.losses(trial.learner_distributions);
        if (trial.nature_losses.rows() != k || trial.nature_losses.cols() != g.experts)
            throw DomainError("nature '" + g.nature + "' returned a loss matrix of the wrong shape");
        trial.learner_loss = mix_loss(trial.learner_distributions, trial.nature_losses);
        trial.expert_pack_losses = pack_loss_sums(trial.nature_losses);
        learner.observe(trial.nature_losses);
        g.total_loss += trial.learner_loss;
        for (std::size_t n = 0; n < g.experts; ++n) g.expert_losses[n] += trial.expert_pack_losses[n];
        g.trials.push_back(std::move(trial));
    }
    g.regret = regret_of(g.total_loss, g.expert_losses);
    return g;
}

}  // namespace aapack::mixloss
