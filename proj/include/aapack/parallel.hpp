#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "aapack/aap.hpp"
#include "aapack/aggregator.hpp"

namespace aapack {

struct CopyAssignment {
    std::size_t trial = 0;  // 1-based
    std::size_t item = 0;   // 0-based position within the pack
    std::size_t copy = 0;   // 0-based copy index

    bool operator==(const CopyAssignment&) const = default;
};

/// Array of classic Aggregating Algorithm instances for delayed outcomes.
///
/// Each item goes to the lowest-numbered ready copy, which is then blocked
/// until the item's outcome arrives. A new copy is added only when every
/// existing copy is blocked. For packs all outcomes arrive at pack end, so
/// item k of every pack lands on copy k.
class CopyPool {
public:
    CopyPool(const GameSpec& game, std::span<const double> prior)
        : game_(game), prior_(prior.begin(), prior.end()) {
        game_.validate();
        validate_probability_vector(prior_, "prior");
    }

    double predict(std::span<const double> expert_preds) {
        std::size_t c = 0;
        while (c < copies_.size() && !ready_[c]) ++c;
        if (c == copies_.size()) {
            copies_.push_back(init_state(prior_));
            ready_.push_back(true);
        }
        const double gamma = predict_item(copies_[c], expert_preds, game_);
        ready_[c] = false;
        pending_.push_back({std::vector<double>(expert_preds.begin(), expert_preds.end()), gamma, c});
        log_.push_back({trial_ + 1, pending_.size() - 1, c});
        return gamma;
    }

    PackFeedback observe(std::span<const double> outcomes) {
        if (outcomes.size() != pending_.size())
            throw DomainError("observe: " + std::to_string(outcomes.size()) + " outcomes for " +
                              std::to_string(pending_.size()) + " predictions");
        PackFeedback fb;
        fb.expert_losses = Matrix(outcomes.size(), prior_.size());
        for (std::size_t k = 0; k < outcomes.size(); ++k) {
            const Pending& p = pending_[k];
            Matrix single(1, prior_.size());
            for (std::size_t n = 0; n < prior_.size(); ++n) {
                single(0, n) = game_.loss(p.expert_preds[n], outcomes[k]);
                fb.expert_losses(k, n) = single(0, n);
            }
            copies_[p.copy] = observe_pack(std::move(copies_[p.copy]), single,
                                           DivisorPolicy::fixed(1), game_);
            ready_[p.copy] = true;
            fb.learner_preds.push_back(p.gamma);
            fb.learner_losses.push_back(game_.loss(p.gamma, outcomes[k]));
        }
        pending_.clear();
        ++trial_;
        return fb;
    }

    std::size_t size() const { return copies_.size(); }
    const std::vector<AggregatorState>& copies() const { return copies_; }
    bool ready(std::size_t c) const { return ready_.at(c); }
    const std::vector<CopyAssignment>& assignment_log() const { return log_; }

private:
    struct Pending {
        std::vector<double> expert_preds;
        double gamma;
        std::size_t copy;
    };

    GameSpec game_;
    std::vector<double> prior_;
    std::vector<AggregatorState> copies_;
    std::vector<bool> ready_;
    std::vector<Pending> pending_;
    std::vector<CopyAssignment> log_;
    std::size_t trial_ = 0;
};

struct ParallelRun {
    std::vector<TrialRecord> records;
    std::size_t pool_size = 0;
    std::vector<CopyAssignment> assignments;
    std::vector<AggregatorState> copies;
};

inline ParallelRun run_parallel_copies(const PackStream& stream, const GameSpec& game,
                                       std::span<const double> prior) {
    game.validate();
    validate_probability_vector(prior, "prior");
    ParallelRun out;
    if (stream.empty()) return out;
    if (prior.size() != stream.experts)
        throw DomainError("prior has " + std::to_string(prior.size()) + " entries for " +
                          std::to_string(stream.experts) + " experts");
    stream.validate(game);

    CopyPool pool(game, prior);
    TrialRecorder recorder(stream.experts);
    for (const Pack& pack : stream.packs) {
        for (std::size_t k = 0; k < pack.size(); ++k) pool.predict(pack.item(k));
        PackFeedback fb = pool.observe(pack.outcomes);
        recorder.add(std::move(fb.learner_preds), fb.learner_losses, fb.expert_losses);
    }
    out.records = recorder.take();
    out.pool_size = pool.size();
    out.assignments = pool.assignment_log();
    out.copies = pool.copies();
    return out;
}

inline std::vector<TrialRecord> run_parallel(const PackStream& stream, const GameSpec& game,
                                             std::span<const double> prior) {
    return run_parallel_copies(stream, game, prior).records;
}

/// Copy of `stream` with the items of every pack permuted (expert
/// predictions and outcomes move together).
template <class Rng>
PackStream shuffle_within_packs(const PackStream& stream, Rng& rng) {
    PackStream out = stream;
    for (std::size_t t = 0; t < stream.packs.size(); ++t) {
        const Pack& src = stream.packs[t];
        std::vector<std::size_t> order(src.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        Pack& dst = out.packs[t];
        for (std::size_t k = 0; k < order.size(); ++k) {
            dst.outcomes[k] = src.outcomes[order[k]];
            std::copy(src.item(order[k]).begin(), src.item(order[k]).end(), dst.predictions.row(k).begin());
        }
    }
    return out;
}

struct ShuffleSummary {
    std::vector<double> losses;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::uint64_t seed = 0;
    /// Tightest delay bound C L_n + (C D / eta) ln(1/p_n) over experts. Expert
    /// losses and D do not depend on the order, so one value serves every run.
    double delay_bound = kInf;
    std::size_t bound_violations = 0;

    bool operator==(const ShuffleSummary&) const = default;
};

/// Total Parallel Copies loss over `num_shuffles` random within-pack orders.
/// Orders are drawn sequentially from one seeded generator, so the result
/// depends only on the inputs; runs themselves may execute on several threads.
inline ShuffleSummary shuffle_experiment(const PackStream& stream, const GameSpec& game,
                                         std::span<const double> prior, std::size_t num_shuffles,
                                         std::uint64_t seed) {
    if (num_shuffles < 1) throw DomainError("shuffle experiment: need at least one shuffle");
    // Validate up front; worker threads must not throw.
    game.validate();
    validate_probability_vector(prior, "prior");
    if (!stream.empty() && prior.size() != stream.experts)
        throw DomainError("shuffle experiment: prior length does not match expert count");
    stream.validate(game);

    std::mt19937_64 rng(seed);
    std::vector<PackStream> orders;
    orders.reserve(num_shuffles);
    for (std::size_t i = 0; i < num_shuffles; ++i) orders.push_back(shuffle_within_packs(stream, rng));

    ShuffleSummary s;
    s.seed = seed;
    s.losses.assign(num_shuffles, 0.0);
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < num_shuffles; i += stride) {
            const auto records = run_parallel(orders[i], game, prior);
            s.losses[i] = records.empty() ? 0.0 : records.back().cumulative_loss;
        }
    };
    const std::size_t threads =
        std::min<std::size_t>(num_shuffles, std::max(1u, std::thread::hardware_concurrency()));
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }

    if (!stream.empty()) {
        const auto base = run_parallel(stream, game, prior);
        const auto& last = base.back();
        const double d = static_cast<double>(stream.max_pack_size());
        for (std::size_t n = 0; n < prior.size(); ++n)
            s.delay_bound = std::min(s.delay_bound, game.c_admissible * last.expert_cumulative_losses[n] +
                                                        game.c_admissible * d / game.eta * -std::log(prior[n]));
        for (double l : s.losses)
            if (l - s.delay_bound > kAccumTol * std::max(1.0, std::abs(s.delay_bound))) ++s.bound_violations;
    }
    s.min = *std::min_element(s.losses.begin(), s.losses.end());
    s.max = *std::max_element(s.losses.begin(), s.losses.end());
    s.mean = sum(s.losses) / static_cast<double>(num_shuffles);
    return s;
}

}  // namespace aapack
