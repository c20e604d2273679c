#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aapack/aap.hpp"
#include "aapack/bounds.hpp"
#include "aapack/parallel.hpp"

namespace aapack {

struct AlgorithmRun {
    Algorithm algorithm = Algorithm::aap_current;
    std::size_t declared_k = 0;  // AAP-e / AAP-max only
    std::vector<TrialRecord> records;
    double total_loss = 0.0;
    double total_average_loss = 0.0;
    std::vector<BoundReport> audits;
    std::size_t pool_size = 0;  // Parallel Copies only

    bool audits_passed() const {
        for (const auto& a : audits)
            if (!a.passed()) return false;
        return true;
    }
    bool operator==(const AlgorithmRun&) const = default;
};

struct ShuffleRequest {
    std::size_t count = 500;
    std::uint64_t seed = 0;
};

struct ExperimentConfig {
    std::vector<Algorithm> algorithms;
    std::vector<double> prior;  // empty means uniform
    std::optional<ShuffleRequest> shuffle;
    /// K for AAP-e and AAP-max; defaults to the stream's largest pack.
    std::optional<std::size_t> declared_k;
    bool audit_every_prefix = false;
};

struct ExperimentResult {
    GameSpec game;
    std::size_t experts = 0;
    std::size_t trials = 0;
    std::size_t items = 0;
    std::vector<double> prior;
    std::vector<AlgorithmRun> runs;
    std::optional<ShuffleSummary> shuffle;

    const AlgorithmRun* find(Algorithm a) const {
        for (const auto& r : runs)
            if (r.algorithm == a) return &r;
        return nullptr;
    }
    bool audits_passed() const {
        for (const auto& r : runs)
            if (!r.audits_passed()) return false;
        return !shuffle || shuffle->bound_violations == 0;
    }
    bool operator==(const ExperimentResult&) const = default;
};

/// The pack algorithms applicable to `stream`: AAP-e only when every pack has
/// the same size.
inline std::vector<Algorithm> all_algorithms(const PackStream& stream) {
    std::vector<Algorithm> out;
    if (stream.constant_pack_size()) out.push_back(Algorithm::aap_equal);
    for (auto a : {Algorithm::aap_max, Algorithm::aap_incremental, Algorithm::aap_current, Algorithm::parallel})
        out.push_back(a);
    return out;
}

/// Run one algorithm and audit it against its guarantees.
inline AlgorithmRun run_algorithm(Algorithm a, const PackStream& stream, const GameSpec& game,
                                  std::span<const double> prior, std::size_t declared_k,
                                  bool every_prefix = false) {
    AlgorithmRun run;
    run.algorithm = a;
    switch (a) {
        case Algorithm::aa: run.records = run_classic_aa(stream, game, prior); break;
        case Algorithm::aap_equal:
            run.declared_k = declared_k;
            run.records = run_aap_equal(stream, declared_k, game, prior);
            break;
        case Algorithm::aap_max:
            run.declared_k = declared_k;
            run.records = run_aap_max(stream, declared_k, game, prior);
            break;
        case Algorithm::aap_incremental: run.records = run_aap_incremental(stream, game, prior); break;
        case Algorithm::aap_current: run.records = run_aap_current(stream, game, prior); break;
        case Algorithm::parallel: {
            auto pr = run_parallel_copies(stream, game, prior);
            run.records = std::move(pr.records);
            run.pool_size = pr.pool_size;
            break;
        }
    }
    if (!run.records.empty()) {
        run.total_loss = run.records.back().cumulative_loss;
        run.total_average_loss = run.records.back().cumulative_average_loss;
    }
    AuditParams ap;
    ap.c = game.c_admissible;
    ap.eta = game.eta;
    ap.prior.assign(prior.begin(), prior.end());
    if (a == Algorithm::aa) ap.declared_k = 1;
    if (a == Algorithm::aap_equal || a == Algorithm::aap_max) ap.declared_k = declared_k;
    AuditOptions opts;
    opts.every_prefix = every_prefix;
    for (Guarantee g : guarantees_for(a)) run.audits.push_back(audit_run(run.records, g, ap, opts));
    return run;
}

/// Run every selected algorithm over the same stream, audit each run, and
/// optionally repeat Parallel Copies over shuffled pack orders.
inline ExperimentResult run_experiment(const PackStream& stream, const GameSpec& game,
                                       const ExperimentConfig& config) {
    if (config.algorithms.empty()) throw DomainError("experiment: select at least one algorithm");
    game.validate();
    ExperimentResult res;
    res.game = game;
    res.experts = stream.experts;
    res.trials = stream.size();
    res.items = stream.total_items();
    res.prior = config.prior.empty() ? (stream.experts ? uniform_prior(stream.experts) : std::vector<double>{})
                                     : config.prior;
    if (res.prior.empty()) res.prior = {1.0};
    const std::size_t k = config.declared_k.value_or(std::max<std::size_t>(1, stream.max_pack_size()));
    for (Algorithm a : config.algorithms)
        res.runs.push_back(run_algorithm(a, stream, game, res.prior, k, config.audit_every_prefix));
    if (config.shuffle)
        res.shuffle = shuffle_experiment(stream, game, res.prior, config.shuffle->count, config.shuffle->seed);
    return res;
}

}  // namespace aapack
