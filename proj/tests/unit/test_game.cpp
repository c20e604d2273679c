#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "aapack/game.hpp"
#include "support/generators.hpp"

namespace aapack {
namespace {

using testing::Rng;

TEST(SquareLoss, ClosedForm) {
    const auto g = GameSpec::square(0.0, 1.0);
    EXPECT_DOUBLE_EQ(square_loss(0.5, 0.5, g), 0.0);
    EXPECT_DOUBLE_EQ(square_loss(0.0, 1.0, g), 1.0);
    EXPECT_NEAR(square_loss(0.2, 0.8, g), 0.36, 1e-15);
}

TEST(SquareLoss, RejectsOutOfInterval) {
    const auto g = GameSpec::square(0.0, 1.0);
    EXPECT_THROW(square_loss(1.5, 0.5, g), DomainError);
    EXPECT_THROW(square_loss(0.5, -0.1, g), DomainError);
    EXPECT_THROW(square_loss(std::nan(""), 0.5, g), DomainError);
}

TEST(MaxMixableEta, Values) {
    EXPECT_DOUBLE_EQ(max_mixable_eta(0, 1), 2.0);
    EXPECT_DOUBLE_EQ(max_mixable_eta(-1, 1), 0.5);
    EXPECT_DOUBLE_EQ(max_mixable_eta(0, 10), 0.02);
    EXPECT_THROW(max_mixable_eta(1, 1), DomainError);
    EXPECT_THROW(max_mixable_eta(2, 1), DomainError);
}

TEST(GameSpec, DefaultsAndValidation) {
    const auto g = GameSpec::square(3.0, 5.0);
    EXPECT_DOUBLE_EQ(g.eta, 0.5);
    EXPECT_DOUBLE_EQ(g.c_admissible, 1.0);
    EXPECT_THROW(GameSpec::square(1.0, 1.0), DomainError);
    GameSpec bad = g;
    bad.c_admissible = 0.5;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = g;
    bad.eta = 0.0;
    EXPECT_THROW(bad.validate(), DomainError);
}

TEST(GeneralizedPrediction, Examples) {
    const auto g = GameSpec::square(0.0, 1.0);
    const std::vector<double> one{1.0}, e1{0.3};
    EXPECT_NEAR(generalized_prediction(one, e1, g, 0.3), 0.0, 1e-15);

    const std::vector<double> half{0.5, 0.5}, ends{0.0, 1.0};
    EXPECT_NEAR(generalized_prediction(half, ends, g, 0.5), 0.25, 1e-15);

    // 50-digit value: 0.136005037856730488945...
    const std::vector<double> w{0.75, 0.25}, e{0.2, 0.8};
    EXPECT_NEAR(generalized_prediction(w, e, g, 0.0), 0.13600503785673049, 1e-15);
}

TEST(GeneralizedPrediction, Errors) {
    const auto g = GameSpec::square(0.0, 1.0);
    const std::vector<double> none;
    EXPECT_THROW(generalized_prediction(none, none, g, 0.5), DomainError);
    const std::vector<double> w{0.5, 0.6}, e{0.1, 0.2};
    EXPECT_THROW(generalized_prediction(w, e, g, 0.5), DomainError);
    const std::vector<double> w2{0.5, 0.5}, out{0.1, 1.2};
    EXPECT_THROW(generalized_prediction(w2, out, g, 0.5), DomainError);
}

TEST(GeneralizedPrediction, MatchesNaiveFormulaAndSurvivesUnderflow) {
    Rng rng(11);
    const auto g = GameSpec::square(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = testing::uniform_int(rng, 1, 8);
        const auto w = testing::random_probability(rng, n);
        const auto e = testing::random_points(rng, n, 0.0, 1.0);
        const double omega = testing::uniform(rng);
        EXPECT_NEAR(generalized_prediction(w, e, g, omega),
                    testing::naive_generalized_prediction(w, e, g.eta, 1.0, omega), 1e-12);
    }
    // Log weights far below exp's range still give a finite answer.
    GeneralizedPrediction gp({-5000.0, -5001.0}, {0.2, 0.9}, g);
    EXPECT_TRUE(std::isfinite(gp(0.5)));
    EXPECT_TRUE(std::isfinite(gp.substitute()));
}

TEST(Substitute, Examples) {
    const auto g = GameSpec::square(0.0, 1.0);
    const std::vector<double> one{1.0}, e1{0.3};
    EXPECT_EQ(substitute(one, e1, g), 0.3);

    const std::vector<double> half{0.5, 0.5}, ends{0.0, 1.0};
    EXPECT_NEAR(substitute(half, ends, g), 0.5, 1e-12);

    const std::vector<double> w{0.75, 0.25}, e{0.2, 0.8};
    const double gamma = substitute(w, e, g);
    EXPECT_NEAR(gamma, 0.3624, 1e-4);
    // Brute-force minimax over a 10^4 grid lands on the same point.
    EXPECT_NEAR(gamma, testing::grid_minimax_substitution(w, e, 0.0, 1.0, 2.0), 2e-4);
    EXPECT_LE(check_substitution_validity(gamma, w, e, g, 1001), 1e-12);
}

TEST(Substitute, ZeroWeightExpertsIgnored) {
    const auto g = GameSpec::square(0.0, 1.0);
    const std::vector<double> w{0.0, 1.0, 0.0}, e{0.9, 0.4, 0.1};
    EXPECT_EQ(substitute(w, e, g), 0.4);
}

TEST(Substitute, ShiftedInterval) {
    // The game on [A, B] is the [0, 1] game translated and scaled.
    const auto unit = GameSpec::square(0.0, 1.0);
    const auto wide = GameSpec::square(-3.0, 7.0);
    const std::vector<double> w{0.6, 0.3, 0.1}, e{0.1, 0.5, 0.95};
    std::vector<double> e_wide;
    for (double x : e) e_wide.push_back(-3.0 + 10.0 * x);
    EXPECT_NEAR(substitute(w, e_wide, wide), -3.0 + 10.0 * substitute(w, e, unit), 1e-12);
}

TEST(CheckSubstitutionValidity, WorstCaseSingleExpert) {
    const auto g = GameSpec::square(2.0, 5.0);
    const std::vector<double> one{1.0}, at_b{5.0};
    EXPECT_NEAR(check_substitution_validity(2.0, one, at_b, g, 11), 9.0, 1e-12);
    EXPECT_THROW(check_substitution_validity(2.0, one, at_b, g, 1), DomainError);
}

TEST(CheckSubstitutionValidity, FinerGridAgrees) {
    Rng rng(5);
    const auto g = GameSpec::square(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = testing::uniform_int(rng, 2, 6);
        const auto w = testing::random_probability(rng, n);
        const auto e = testing::random_points(rng, n, 0.0, 1.0);
        const double gamma = substitute(w, e, g);
        EXPECT_LE(check_substitution_validity(gamma, w, e, g, 1001), 1e-12);
        EXPECT_LE(check_substitution_validity(gamma, w, e, g, 20001), 1e-12);
    }
}

// Admissibility holds at every rate up to the mixable maximum and on
// arbitrary intervals.
TEST(Substitute, AdmissibleAcrossRatesAndIntervals) {
    Rng rng(99);
    for (int i = 0; i < 500; ++i) {
        const double lo = testing::uniform(rng, -10.0, 10.0);
        const double hi = lo + testing::uniform(rng, 0.1, 20.0);
        GameSpec g = GameSpec::square(lo, hi);
        g.eta *= testing::uniform(rng, 0.01, 1.0);
        const std::size_t n = testing::uniform_int(rng, 1, 10);
        const auto w = testing::random_probability(rng, n);
        const auto e = testing::random_points(rng, n, lo, hi);
        const double gamma = substitute(w, e, g);
        ASSERT_TRUE(g.contains(gamma));
        const double tol = 1e-12 * std::max(1.0, (hi - lo) * (hi - lo));
        EXPECT_LE(check_substitution_validity(gamma, w, e, g, 1001), tol) << "instance " << i;
    }
}

TEST(Substitute, AboveMixableRateNeedsLargerConstant) {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        GameSpec g = GameSpec::square(0.0, 1.0);
        const double factor = testing::uniform(rng, 1.0, 6.0);
        g.eta *= factor;
        g.c_admissible = factor;
        const std::size_t n = testing::uniform_int(rng, 2, 6);
        const auto w = testing::random_probability(rng, n);
        const auto e = testing::random_points(rng, n, 0.0, 1.0);
        EXPECT_LE(check_substitution_validity(substitute(w, e, g), w, e, g, 1001), 1e-12);
    }
}

TEST(Substitute, EtaMonotonicity) {
    // A prediction valid at rate eta1 stays valid at every smaller rate.
    Rng rng(21);
    for (int i = 0; i < 300; ++i) {
        const auto g1 = GameSpec::square(0.0, 1.0);
        const std::size_t n = testing::uniform_int(rng, 2, 7);
        const auto w = testing::random_probability(rng, n);
        const auto e = testing::random_points(rng, n, 0.0, 1.0);
        const double gamma = substitute(w, e, g1);
        GameSpec g2 = g1;
        g2.eta = g1.eta * testing::uniform(rng, 0.01, 1.0);
        EXPECT_LE(check_substitution_validity(gamma, w, e, g2, 1001), 1e-12);
    }
}

TEST(Substitute, ScaledGameMatchesScaledRate) {
    Rng rng(8);
    for (int i = 0; i < 300; ++i) {
        const double a = testing::uniform(rng, 0.05, 1.0);
        GameSpec scaled = GameSpec::square(0.0, 1.0);
        scaled.loss_scale = a;
        scaled.eta = testing::uniform(rng, 0.1, 2.0 / a);
        GameSpec plain = GameSpec::square(0.0, 1.0);
        plain.eta = a * scaled.eta;
        const std::size_t n = testing::uniform_int(rng, 2, 6);
        const auto w = testing::random_probability(rng, n);
        const auto e = testing::random_points(rng, n, 0.0, 1.0);
        EXPECT_NEAR(substitute(w, e, scaled), substitute(w, e, plain), 1e-12);
    }
}

TEST(Superpredictions, ConvexCombinationIsDominated) {
    // For square loss the mixture alpha*l(g1,.) + (1-alpha)*l(g2,.) is
    // dominated by the loss of the mixed prediction.
    Rng rng(17);
    const auto g = GameSpec::square(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double g1 = testing::uniform(rng), g2 = testing::uniform(rng), alpha = testing::uniform(rng);
        const double gamma = alpha * g1 + (1 - alpha) * g2;
        for (int j = 0; j <= 100; ++j) {
            const double w = j / 100.0;
            EXPECT_LE(square_loss(gamma, w, g),
                      alpha * square_loss(g1, w, g) + (1 - alpha) * square_loss(g2, w, g) + 1e-15);
        }
    }
}

// Per-item substitutions at rate eta satisfy the pack inequality at eta/K.
TEST(PackMixability, HolderConstructionExhaustive) {
    Rng rng(31);
    const auto g = GameSpec::square(0.0, 1.0);
    const std::vector<double> outcomes{0.0, 0.5, 1.0};
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = testing::uniform_int(rng, 1, 3);
        const std::size_t k = testing::uniform_int(rng, 1, 3);
        const auto w = testing::random_probability(rng, n);
        std::vector<std::vector<double>> experts;
        std::vector<double> gammas;
        for (std::size_t j = 0; j < k; ++j) {
            experts.push_back(testing::random_points(rng, n, 0.0, 1.0));
            gammas.push_back(substitute(w, experts.back(), g));
        }
        EXPECT_LE(testing::pack_inequality_violation(w, experts, gammas, outcomes, g.eta, 1.0), 1e-12);
    }
}

TEST(PackMixability, FailsWithoutRateReduction) {
    // At the full rate eta the pack inequality is not guaranteed; a K=2
    // instance with opposing experts breaks it.
    const auto g = GameSpec::square(0.0, 1.0);
    const std::vector<double> w{0.5, 0.5}, outcomes{0.0, 1.0};
    const std::vector<std::vector<double>> experts{{0.0, 1.0}, {0.0, 1.0}};
    const std::vector<double> gammas{substitute(w, experts[0], g), substitute(w, experts[1], g)};
    EXPECT_GT(testing::pack_inequality_violation(w, experts, gammas, outcomes, 2.0 * g.eta, 1.0), 1e-6);
}

}  // namespace
}  // namespace aapack
