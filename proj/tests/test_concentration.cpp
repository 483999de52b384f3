#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>

#include "mpent/concentration.hpp"

using namespace mpent;

namespace {

// Enumerates all r^n Schmidt strings, groups them by type, and averages
// log2 of the class size.
double brute_yield_per_copy(const std::vector<double>& p, std::size_t n) {
    const std::size_t r = p.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= r;
    std::map<std::vector<unsigned>, std::pair<double, double>> classes; // type -> (count, prob)
    for (std::size_t s = 0; s < total; ++s) {
        std::vector<unsigned> t(r, 0);
        double pr = 1.0;
        std::size_t rem = s;
        for (std::size_t i = 0; i < n; ++i) {
            ++t[rem % r];
            pr *= p[rem % r];
            rem /= r;
        }
        auto& c = classes[t];
        c.first += 1;
        c.second += pr;
    }
    double y = 0.0;
    for (const auto& [t, c] : classes) y += c.second * std::log2(c.first);
    return y / double(n);
}

// Sum of the 2^k largest string probabilities.
double brute_dilution(const std::vector<double>& p, std::size_t n, std::size_t k) {
    const std::size_t r = p.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= r;
    std::vector<double> probs(total);
    for (std::size_t s = 0; s < total; ++s) {
        double pr = 1.0;
        std::size_t rem = s;
        for (std::size_t i = 0; i < n; ++i) {
            pr *= p[rem % r];
            rem /= r;
        }
        probs[s] = pr;
    }
    std::sort(probs.begin(), probs.end(), std::greater<>());
    double f = 0.0;
    for (std::size_t i = 0; i < std::min(total, std::size_t{1} << k); ++i) f += probs[i];
    return f;
}

const std::vector<double> kP{0.75, 0.25};

} // namespace

TEST(Concentration, MatchesStringEnumeration) {
    for (std::size_t n : {1u, 2u, 5u, 10u, 14u}) {
        EXPECT_NEAR(concentration_yield_distribution(kP, n).yield_per_copy(), brute_yield_per_copy(kP, n), 1e-10);
    }
    const std::vector<double> q{0.5, 0.3, 0.2};
    for (std::size_t n : {3u, 7u}) {
        EXPECT_NEAR(concentration_yield_distribution(q, n).yield_per_copy(), brute_yield_per_copy(q, n), 1e-10);
    }
}

TEST(Concentration, BranchesFormADistribution) {
    const auto r = concentration_yield_distribution(kP, 30);
    EXPECT_EQ(r.branches.size(), 31u);
    double total = 0.0;
    for (const auto& b : r.branches) total += b.probability;
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(r.entropy, 0.8112781244591328, 1e-15);
}

TEST(Concentration, ApproachesEntropy) {
    const std::vector<std::pair<std::size_t, double>> frozen{
        {25, 0.68512}, {50, 0.73812}, {100, 0.76968}, {200, 0.78797}, {400, 0.79838}};
    double last_gap = 1.0;
    for (const auto& [n, v] : frozen) {
        const auto r = concentration_yield_distribution(kP, n);
        EXPECT_NEAR(r.yield_per_copy(), v, 1e-5);
        const double gap = r.entropy - r.yield_per_copy();
        EXPECT_GT(gap, 0.0);
        EXPECT_LT(gap, last_gap);
        last_gap = gap;
    }
    EXPECT_LT(last_gap, 0.02);
}

TEST(Concentration, Errors) {
    EXPECT_THROW(concentration_yield_distribution({0.5, 0.4}, 3), std::invalid_argument);
    EXPECT_THROW(concentration_yield_distribution({1.5, -0.5}, 3), std::invalid_argument);
    EXPECT_THROW(concentration_yield_distribution(kP, 0), std::invalid_argument);
    EXPECT_THROW(concentration_yield_distribution({}, 3), std::invalid_argument);
}

TEST(Concentration, ProductStateYieldsNothing) {
    EXPECT_EQ(concentration_yield_distribution({1.0, 0.0}, 10).expected_yield, 0.0);
}

TEST(Dilution, MatchesSortedStrings) {
    for (std::size_t k = 0; k <= 12; ++k) EXPECT_NEAR(dilution_fidelity(kP, 12, k), brute_dilution(kP, 12, k), 1e-12);
    const std::vector<double> q{0.5, 0.3, 0.2};
    for (std::size_t k = 0; k <= 9; ++k) EXPECT_NEAR(dilution_fidelity(q, 6, k), brute_dilution(q, 6, k), 1e-12);
}

TEST(Dilution, TwentyCopies) {
    const std::vector<std::pair<std::size_t, double>> frozen{{14, 0.54780}, {15, 0.66532}, {16, 0.79314},
                                                             {17, 0.88817}, {18, 0.95820}, {19, 0.99110},
                                                             {20, 1.0}};
    for (const auto& [k, v] : frozen) EXPECT_NEAR(dilution_fidelity(kP, 20, k), v, 1e-5);
    EXPECT_NEAR(dilution_fidelity(kP, 20, 18), brute_dilution(kP, 20, 18), 1e-12);
}

TEST(Dilution, NondecreasingInK) {
    for (std::size_t n : {5u, 40u, 200u}) {
        double prev = 0.0;
        for (std::size_t k = 0; k <= n + 2; ++k) {
            const double f = dilution_fidelity(kP, n, k);
            EXPECT_GE(f, prev - 1e-15);
            EXPECT_LE(f, 1.0 + 1e-12);
            prev = f;
        }
        EXPECT_NEAR(prev, 1.0, 1e-12);
    }
}
