#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "aapack/mixloss.hpp"
#include "support/generators.hpp"

namespace aapack::mixloss {
namespace {

using aapack::testing::Rng;

const double kLn2 = std::log(2.0);

TEST(MixLoss, Examples) {
    const Distributions half{{0.5, 0.5}};
    EXPECT_EQ(mix_loss(half, Matrix::from_rows({{0.0, 0.0}})), 0.0);
    EXPECT_NEAR(mix_loss(half, Matrix::from_rows({{0.0, kInf}})), kLn2, 1e-15);
    const Distributions three(3, {0.5, 0.5});
    EXPECT_NEAR(mix_loss(three, Matrix::from_rows({{0.0, kInf}, {0.0, kInf}, {0.0, kInf}})), 3 * kLn2, 1e-15);
}

TEST(MixLoss, InfiniteAndNegativeLosses) {
    const Distributions d{{1.0, 0.0}};
    EXPECT_EQ(mix_loss(d, Matrix::from_rows({{kInf, 0.0}})), kInf);
    EXPECT_NEAR(mix_loss(d, Matrix::from_rows({{-2.0, 5.0}})), -2.0, 1e-15);
    EXPECT_THROW(mix_loss(d, Matrix::from_rows({{std::nan(""), 0.0}})), DomainError);
    EXPECT_THROW(mix_loss(d, Matrix::from_rows({{0.0, 0.0}, {0.0, 0.0}})), DomainError);
}

TEST(MixLoss, AdditiveOverRepeatedDistribution) {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = aapack::testing::uniform_int(rng, 1, 5);
        const std::size_t k = aapack::testing::uniform_int(rng, 1, 5);
        const auto p = aapack::testing::random_probability(rng, n);
        Matrix losses(0, n);
        double separate = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const auto row = aapack::testing::random_points(rng, n, 0.0, 3.0);
            losses.append_row(row);
            Matrix one(0, n);
            one.append_row(row);
            separate += mix_loss({p}, one);
        }
        EXPECT_NEAR(mix_loss(Distributions(k, p), losses), separate, 1e-12);
    }
}

TEST(LowProductExpert, Examples) {
    EXPECT_EQ(find_low_product_expert(Distributions(3, {0.5, 0.5})), 0u);
    EXPECT_EQ(find_low_product_expert({{0.9, 0.1}}), 1u);
    // Products 0.1, 0.09, 0.1 all sit below 1/9; the lowest index wins.
    EXPECT_EQ(find_low_product_expert({{0.5, 0.3, 0.2}, {0.2, 0.3, 0.5}}), 0u);
    EXPECT_EQ(find_low_product_expert({{0.6, 0.3, 0.1}, {0.2, 0.3, 0.5}}), 1u);
    EXPECT_EQ(find_low_product_expert({{1.0, 0.0}}), 1u);
    EXPECT_THROW(find_low_product_expert({}), DomainError);
    EXPECT_THROW(find_low_product_expert({{0.5, 0.6}}), DomainError);
}

TEST(LowProductExpert, AmGmRandomTuples) {
    Rng rng(2);
    for (int i = 0; i < 10000; ++i) {
        const std::size_t n = aapack::testing::uniform_int(rng, 1, 8);
        const std::size_t k = aapack::testing::uniform_int(rng, 1, 6);
        Distributions d;
        for (std::size_t j = 0; j < k; ++j) d.push_back(aapack::testing::random_probability(rng, n));
        const std::size_t n0 = find_low_product_expert(d);
        double log_prod = 0.0;
        for (const auto& v : d) log_prod += std::log(v[n0]);
        EXPECT_LE(log_prod, -static_cast<double>(k) * std::log(static_cast<double>(n)) + 1e-12);
        // Lowest index: every earlier expert fails the test.
        for (std::size_t m = 0; m < n0; ++m) {
            double lp = 0.0;
            for (const auto& v : d) lp += std::log(v[m]);
            EXPECT_GT(lp, -static_cast<double>(k) * std::log(static_cast<double>(n)) + 1e-12);
        }
    }
}

TEST(Adversary, Examples) {
    const Distributions uniform3(3, {0.5, 0.5});
    const Matrix m = adversary_nature(uniform3);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(m(k, 0), 0.0);
        EXPECT_EQ(m(k, 1), kInf);
    }
    EXPECT_NEAR(mix_loss(uniform3, m), 3 * kLn2, 1e-12);

    const Distributions skew{{0.9, 0.1}};
    EXPECT_NEAR(mix_loss(skew, adversary_nature(skew)), -std::log(0.1), 1e-12);
}

TEST(Adversary, ForcesPackRegretOnRandomLearners) {
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t n = aapack::testing::uniform_int(rng, 1, 6);
        const std::size_t k = aapack::testing::uniform_int(rng, 1, 5);
        Distributions d;
        for (std::size_t j = 0; j < k; ++j) d.push_back(aapack::testing::random_probability(rng, n));
        EXPECT_GE(mix_loss(d, adversary_nature(d)),
                  static_cast<double>(k) * std::log(static_cast<double>(n)) - 1e-9);
    }
}

TEST(Game, UniformLearnerEqualityCases) {
    UniformLearner two(2);
    AdversaryNature adv;
    const std::vector<std::size_t> sizes{3, 3, 3};
    const auto g = run_mixloss_game(two, adv, sizes);
    EXPECT_NEAR(g.regret, 9 * kLn2, 1e-9);
    EXPECT_EQ(g.expert_losses[0], 0.0);
    EXPECT_EQ(g.expert_losses[1], kInf);

    UniformLearner four(4);
    const std::vector<std::size_t> sizes2{2, 3};
    EXPECT_NEAR(run_mixloss_game(four, adv, sizes2).regret, 5 * std::log(4.0), 1e-9);
}

TEST(Game, ZeroNatureGivesZeroRegret) {
    ExponentialWeightsLearner ew(3);
    ZeroNature zero(3);
    const std::vector<std::size_t> sizes{1, 4, 2};
    const auto g = run_mixloss_game(ew, zero, sizes);
    EXPECT_EQ(g.regret, 0.0);
    EXPECT_EQ(g.total_loss, 0.0);
}

TEST(Game, ExponentialWeightsAgainstAdversary) {
    for (bool scaled : {false, true}) {
        ExponentialWeightsLearner ew(2, scaled);
        AdversaryNature adv;
        const std::vector<std::size_t> sizes(10, 3);
        const auto g = run_mixloss_game(ew, adv, sizes);
        EXPECT_GE(g.regret, 3 * kLn2 - 1e-9);
        EXPECT_NEAR(g.trials[0].learner_loss, 3 * kLn2, 1e-12);
        for (const auto& t : g.trials)
            EXPECT_GE(t.regret_increment(), static_cast<double>(t.pack_size) * kLn2 - 1e-9);
    }
}

TEST(Game, PerPackIncrementAcrossConfigurations) {
    Rng rng(4);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = aapack::testing::uniform_int(rng, 1, 6);
        std::vector<std::size_t> sizes(aapack::testing::uniform_int(rng, 1, 12));
        for (auto& k : sizes) k = aapack::testing::uniform_int(rng, 1, 7);
        UniformLearner u(n);
        ExponentialWeightsLearner ew(aapack::testing::random_probability(rng, n), rep % 2 == 0);
        AdversaryNature adv;
        for (Learner* l : {static_cast<Learner*>(&u), static_cast<Learner*>(&ew)}) {
            const auto g = run_mixloss_game(*l, adv, sizes);
            double forced = 0.0;
            for (const auto& t : g.trials) {
                const double floor = static_cast<double>(t.pack_size) * std::log(static_cast<double>(n));
                EXPECT_GE(t.regret_increment(), floor - 1e-9);
                forced += floor;
            }
            EXPECT_GE(g.regret, forced - 1e-9);
        }
    }
}

class BrokenLearner final : public Learner {
public:
    std::string name() const override { return "broken"; }
    std::size_t experts() const override { return 2; }
    Distributions predict(std::size_t k) override { return Distributions(k, {0.7, 0.7}); }
    void observe(const Matrix&) override {}
};

TEST(Game, InvalidLearnerIsBlamed) {
    BrokenLearner b;
    ZeroNature zero(2);
    const std::vector<std::size_t> sizes{2};
    try {
        run_mixloss_game(b, zero, sizes);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("broken"), std::string::npos);
    }
    const std::vector<std::size_t> bad{0};
    UniformLearner u(2);
    EXPECT_THROW(run_mixloss_game(u, zero, bad), DomainError);
}

TEST(Regret, InfiniteLearnerLoss) {
    const std::vector<double> experts{kInf, kInf};
    EXPECT_EQ(regret_of(kInf, experts), kInf);
    const std::vector<double> finite{1.0, 2.0};
    EXPECT_EQ(regret_of(3.0, finite), 2.0);
}

}  // namespace
}  // namespace aapack::mixloss
