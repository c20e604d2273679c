#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "aapack/aggregator.hpp"
#include "aapack/errors.hpp"
#include "aapack/game.hpp"
#include "aapack/matrix.hpp"

namespace aapack {

/// One trial: expert predictions for K items (row k = item k, one column per
/// expert) and the K outcomes revealed after the learner has predicted all of
/// them. `label` is informational (e.g. "2007-03" for monthly packs).
struct Pack {
    Matrix predictions;
    std::vector<double> outcomes;
    std::string label;

    std::size_t size() const { return outcomes.size(); }
    std::span<const double> item(std::size_t k) const { return predictions.row(k); }

    bool operator==(const Pack&) const = default;
};

struct PackStream {
    std::size_t experts = 0;
    std::vector<Pack> packs;

    bool empty() const { return packs.empty(); }
    std::size_t size() const { return packs.size(); }

    std::size_t max_pack_size() const {
        std::size_t m = 0;
        for (const auto& p : packs) m = std::max(m, p.size());
        return m;
    }
    std::size_t min_pack_size() const {
        if (packs.empty()) return 0;
        std::size_t m = packs.front().size();
        for (const auto& p : packs) m = std::min(m, p.size());
        return m;
    }
    bool constant_pack_size() const { return max_pack_size() == min_pack_size(); }
    std::size_t total_items() const {
        std::size_t s = 0;
        for (const auto& p : packs) s += p.size();
        return s;
    }

    void validate(const GameSpec& game) const {
        for (std::size_t t = 0; t < packs.size(); ++t) {
            const Pack& p = packs[t];
            const std::string where = "pack " + std::to_string(t + 1);
            if (p.size() == 0) throw DomainError(where + ": empty pack");
            if (p.predictions.rows() != p.size() || p.predictions.cols() != experts)
                throw DomainError(where + ": prediction matrix must be " + std::to_string(p.size()) +
                                  "x" + std::to_string(experts));
            for (double x : p.predictions.data())
                if (!game.contains(x)) throw DomainError(where + ": expert prediction outside [A, B]");
            for (double x : p.outcomes)
                if (!game.contains(x)) throw DomainError(where + ": outcome outside [A, B]");
        }
    }

    bool operator==(const PackStream&) const = default;
};

/// Per-trial output of a learner run. Cumulative values include this trial.
struct TrialRecord {
    std::size_t trial_index = 0;  // 1-based
    std::size_t pack_size = 0;
    std::vector<double> learner_preds;
    double learner_pack_loss = 0.0;
    std::vector<double> expert_pack_losses;
    double cumulative_loss = 0.0;
    double cumulative_average_loss = 0.0;
    std::vector<double> expert_cumulative_losses;
    std::vector<double> expert_cumulative_average_losses;

    bool operator==(const TrialRecord&) const = default;
};

/// What a learner reports when a pack closes.
struct PackFeedback {
    std::vector<double> learner_preds;
    std::vector<double> learner_losses;
    Matrix expert_losses;  // item-major
};

/// Streaming aggregating learner for packs.
///
/// Items are predicted one at a time with `predict`; the weights stay fixed
/// until `observe` delivers the pack's outcomes. The policy picks the
/// algorithm: fixed(K) gives AAP-e / AAP-max (fixed(1) on single-item packs is
/// the classic Aggregating Algorithm), running_max gives AAP-incremental and
/// current_pack gives AAP-current.
class PackLearner {
public:
    PackLearner(const GameSpec& game, std::span<const double> prior, DivisorPolicy policy)
        : game_(game), policy_(policy), state_(init_state(prior)), pending_(0, prior.size()) {
        game_.validate();
    }

    double predict(std::span<const double> expert_preds) {
        if (policy_.kind == DivisorPolicy::Kind::fixed && pending_.rows() >= policy_.k)
            throw DomainError("pack exceeds declared size " + std::to_string(policy_.k));
        const double gamma = predict_item(state_, expert_preds, game_);
        pending_.append_row(expert_preds);
        pending_preds_.push_back(gamma);
        return gamma;
    }

    PackFeedback observe(std::span<const double> outcomes) {
        if (outcomes.size() != pending_.rows())
            throw DomainError("observe: " + std::to_string(outcomes.size()) + " outcomes for " +
                              std::to_string(pending_.rows()) + " predictions");
        PackFeedback fb;
        fb.expert_losses = Matrix(outcomes.size(), state_.experts());
        fb.learner_losses.resize(outcomes.size());
        for (std::size_t k = 0; k < outcomes.size(); ++k) {
            for (std::size_t n = 0; n < state_.experts(); ++n)
                fb.expert_losses(k, n) = game_.loss(pending_(k, n), outcomes[k]);
            fb.learner_losses[k] = game_.loss(pending_preds_[k], outcomes[k]);
        }
        state_ = observe_pack(std::move(state_), fb.expert_losses, policy_, game_);
        fb.learner_preds = std::move(pending_preds_);
        pending_preds_.clear();
        pending_ = Matrix(0, state_.experts());
        return fb;
    }

    std::size_t pending() const { return pending_.rows(); }
    const AggregatorState& state() const { return state_; }
    const GameSpec& game() const { return game_; }
    DivisorPolicy policy() const { return policy_; }

private:
    GameSpec game_;
    DivisorPolicy policy_;
    AggregatorState state_;
    Matrix pending_;
    std::vector<double> pending_preds_;
};

/// Accumulates TrialRecords from per-pack feedback.
class TrialRecorder {
public:
    explicit TrialRecorder(std::size_t experts)
        : expert_cum_(experts, 0.0), expert_avg_(experts, 0.0) {}

    const TrialRecord& add(std::vector<double> learner_preds,
                           std::span<const double> learner_losses, const Matrix& expert_losses) {
        TrialRecord r;
        r.trial_index = records_.size() + 1;
        r.pack_size = learner_losses.size();
        r.learner_preds = std::move(learner_preds);
        r.learner_pack_loss = sum(learner_losses);
        r.expert_pack_losses = pack_loss_sums(expert_losses);
        const double k = static_cast<double>(r.pack_size);
        cum_ += r.learner_pack_loss;
        avg_ += r.learner_pack_loss / k;
        for (std::size_t n = 0; n < expert_cum_.size(); ++n) {
            expert_cum_[n] += r.expert_pack_losses[n];
            expert_avg_[n] += r.expert_pack_losses[n] / k;
        }
        r.cumulative_loss = cum_;
        r.cumulative_average_loss = avg_;
        r.expert_cumulative_losses = expert_cum_;
        r.expert_cumulative_average_losses = expert_avg_;
        records_.push_back(std::move(r));
        return records_.back();
    }

    std::vector<TrialRecord> take() { return std::move(records_); }

private:
    double cum_ = 0.0;
    double avg_ = 0.0;
    std::vector<double> expert_cum_;
    std::vector<double> expert_avg_;
    std::vector<TrialRecord> records_;
};

/// Drive a PackLearner over a whole stream, item by item.
inline std::vector<TrialRecord> run_policy(const PackStream& stream, const GameSpec& game,
                                           std::span<const double> prior, DivisorPolicy policy) {
    game.validate();
    validate_probability_vector(prior, "prior");
    if (stream.empty()) return {};
    if (prior.size() != stream.experts)
        throw DomainError("prior has " + std::to_string(prior.size()) + " entries for " +
                          std::to_string(stream.experts) + " experts");
    stream.validate(game);

    PackLearner learner(game, prior, policy);
    TrialRecorder recorder(stream.experts);
    for (const Pack& pack : stream.packs) {
        for (std::size_t k = 0; k < pack.size(); ++k) learner.predict(pack.item(k));
        PackFeedback fb = learner.observe(pack.outcomes);
        recorder.add(std::move(fb.learner_preds), fb.learner_losses, fb.expert_losses);
    }
    return recorder.take();
}

/// AAP-e: every pack has exactly K items.
inline std::vector<TrialRecord> run_aap_equal(const PackStream& stream, std::size_t k,
                                              const GameSpec& game, std::span<const double> prior) {
    const auto policy = DivisorPolicy::fixed(k);
    for (std::size_t t = 0; t < stream.packs.size(); ++t)
        if (stream.packs[t].size() != k)
            throw DomainError("AAP-e: pack " + std::to_string(t + 1) + " has size " +
                              std::to_string(stream.packs[t].size()) + ", expected " +
                              std::to_string(k));
    return run_policy(stream, game, prior, policy);
}

/// Classic Aggregating Algorithm: AAP-e with single-item packs.
inline std::vector<TrialRecord> run_classic_aa(const PackStream& stream, const GameSpec& game,
                                               std::span<const double> prior) {
    return run_aap_equal(stream, 1, game, prior);
}

/// AAP-max: packs of at most K items, weights always divided by K.
inline std::vector<TrialRecord> run_aap_max(const PackStream& stream, std::size_t k,
                                            const GameSpec& game, std::span<const double> prior) {
    return run_policy(stream, game, prior, DivisorPolicy::fixed(k));
}

/// AAP-incremental: divisor is the running maximum pack size.
inline std::vector<TrialRecord> run_aap_incremental(const PackStream& stream, const GameSpec& game,
                                                    std::span<const double> prior) {
    return run_policy(stream, game, prior, DivisorPolicy::running_max());
}

/// AAP-current: divisor is the size of the current pack.
inline std::vector<TrialRecord> run_aap_current(const PackStream& stream, const GameSpec& game,
                                                std::span<const double> prior) {
    return run_policy(stream, game, prior, DivisorPolicy::current_pack());
}

}  // namespace aapack
