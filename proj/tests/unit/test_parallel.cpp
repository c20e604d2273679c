#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "aapack/parallel.hpp"
#include "support/generators.hpp"

namespace aapack {
namespace {

using testing::Rng;

TEST(ParallelCopies, SinglesUseOneCopyAndMatchClassicAA) {
    Rng rng(1);
    const auto g = GameSpec::square(0.0, 1.0);
    const auto s = testing::random_stream(rng, 3, 40, 1, 1);
    const auto prior = testing::random_probability(rng, 3);
    const auto run = run_parallel_copies(s, g, prior);
    EXPECT_EQ(run.pool_size, 1u);
    const auto aa = run_classic_aa(s, g, prior);
    for (std::size_t t = 0; t < aa.size(); ++t)
        EXPECT_NEAR(run.records[t].learner_preds[0], aa[t].learner_preds[0], 1e-12);
}

TEST(ParallelCopies, ItemKGoesToCopyK) {
    Rng rng(2);
    const auto s = testing::random_stream(rng, 2, 25, 1, 6);
    const auto run = run_parallel_copies(s, GameSpec::square(0.0, 1.0), uniform_prior(2));
    std::size_t i = 0;
    for (std::size_t t = 0; t < s.packs.size(); ++t)
        for (std::size_t k = 0; k < s.packs[t].size(); ++k, ++i) {
            EXPECT_EQ(run.assignments[i].trial, t + 1);
            EXPECT_EQ(run.assignments[i].item, k);
            EXPECT_EQ(run.assignments[i].copy, k);
        }
    EXPECT_EQ(i, run.assignments.size());
    EXPECT_EQ(run.pool_size, s.max_pack_size());
}

// Copy j is a classic AA on the subsequence of j-th items.
TEST(ParallelCopies, EachCopyIsClassicAAOnItsSubsequence) {
    Rng rng(3);
    const auto g = GameSpec::square(0.0, 1.0);
    const auto s = testing::random_stream(rng, 3, 30, 3, 3);
    const auto run = run_parallel_copies(s, g, uniform_prior(3));
    for (std::size_t j = 0; j < 3; ++j) {
        PackStream sub;
        sub.experts = 3;
        for (const auto& p : s.packs) {
            Pack one;
            one.predictions = Matrix(0, 3);
            one.predictions.append_row(p.item(j));
            one.outcomes = {p.outcomes[j]};
            sub.packs.push_back(std::move(one));
        }
        const auto aa = run_classic_aa(sub, g, uniform_prior(3));
        for (std::size_t t = 0; t < aa.size(); ++t)
            EXPECT_EQ(run.records[t].learner_preds[j], aa[t].learner_preds[0]);
    }
}

TEST(ParallelCopies, DelayBoundTwoExperts) {
    Rng rng(4);
    const auto g = GameSpec::square(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto s = testing::random_stream(rng, 2, 40, 1, 4);
        const auto recs = run_parallel(s, g, uniform_prior(2));
        const auto& last = recs.back();
        const double best = std::min(last.expert_cumulative_losses[0], last.expert_cumulative_losses[1]);
        const double d = static_cast<double>(s.max_pack_size());
        EXPECT_LE(last.cumulative_loss - best, d / 2.0 * std::log(2.0) + 1e-9);
    }
}

TEST(ParallelCopies, OrderSensitive) {
    Rng rng(5);
    const auto g = GameSpec::square(0.0, 1.0);
    const auto s = testing::random_stream(rng, 3, 30, 4, 4);
    const auto shuffled = shuffle_within_packs(s, rng);
    EXPECT_NE(run_parallel(s, g, uniform_prior(3)).back().cumulative_loss,
              run_parallel(shuffled, g, uniform_prior(3)).back().cumulative_loss);
}

TEST(ShuffleWithinPacks, KeepsItemsIntact) {
    Rng rng(6);
    const auto s = testing::random_stream(rng, 3, 10, 1, 5);
    const auto out = shuffle_within_packs(s, rng);
    for (std::size_t t = 0; t < s.packs.size(); ++t) {
        const auto& a = s.packs[t];
        const auto& b = out.packs[t];
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t k = 0; k < b.size(); ++k) {
            bool found = false;
            for (std::size_t j = 0; j < a.size() && !found; ++j)
                found = a.outcomes[j] == b.outcomes[k] &&
                        std::equal(a.item(j).begin(), a.item(j).end(), b.item(k).begin());
            EXPECT_TRUE(found);
        }
    }
}

TEST(ShuffleExperiment, DeterministicGivenSeed) {
    Rng rng(7);
    const auto g = GameSpec::square(0.0, 1.0);
    const auto s = testing::random_stream(rng, 3, 20, 1, 5);
    const auto a = shuffle_experiment(s, g, uniform_prior(3), 64, 42);
    const auto b = shuffle_experiment(s, g, uniform_prior(3), 64, 42);
    EXPECT_EQ(a, b);
    const auto c = shuffle_experiment(s, g, uniform_prior(3), 64, 43);
    EXPECT_NE(a.losses, c.losses);
    EXPECT_EQ(a.losses.size(), 64u);
    EXPECT_LE(a.min, a.mean);
    EXPECT_LE(a.mean, a.max);
}

TEST(ShuffleExperiment, EveryShuffleMeetsDelayBound) {
    Rng rng(8);
    const auto g = GameSpec::square(0.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        const auto prior = testing::random_probability(rng, 4);
        const auto s = testing::random_stream(rng, 4, 30, 1, 6);
        const auto sum = shuffle_experiment(s, g, prior, 50, rep);
        EXPECT_EQ(sum.bound_violations, 0u);
        for (double l : sum.losses) EXPECT_LE(l, sum.delay_bound + 1e-9);
    }
}

TEST(ShuffleExperiment, NoFreedomMeansNoVariance) {
    Rng rng(9);
    const auto g = GameSpec::square(0.0, 1.0);
    const auto singles = testing::random_stream(rng, 3, 20, 1, 1);
    const auto a = shuffle_experiment(singles, g, uniform_prior(3), 20, 1);
    EXPECT_EQ(a.min, a.max);

    const auto one_expert = testing::random_stream(rng, 1, 20, 1, 5);
    const std::vector<double> prior{1.0};
    const auto b = shuffle_experiment(one_expert, g, prior, 20, 1);
    EXPECT_NEAR(b.max - b.min, 0.0, 1e-12);
}

TEST(ShuffleExperiment, Errors) {
    Rng rng(10);
    const auto s = testing::random_stream(rng, 2, 5, 1, 3);
    EXPECT_THROW(shuffle_experiment(s, GameSpec::square(0.0, 1.0), uniform_prior(2), 0, 1), DomainError);
    EXPECT_THROW(shuffle_experiment(s, GameSpec::square(0.0, 1.0), uniform_prior(3), 5, 1), DomainError);
}

}  // namespace
}  // namespace aapack
