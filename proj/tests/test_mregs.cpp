#include <gtest/gtest.h>

#include <random>

#include "mpent/mregs.hpp"

using namespace mpent;

namespace {

EntropyMatrix three_eprs() {
    auto g = make_entropy_matrix(3);
    const auto f = states::eprs_factors(3);
    g.add("AB", entropy_vector(f[0]));
    g.add("AC", entropy_vector(f[1]));
    g.add("BC", entropy_vector(f[2]));
    return g;
}

} // namespace

TEST(Coefficients, RecoverRandomTriples) {
    const auto g = three_eprs();
    std::mt19937_64 rng(81);
    std::uniform_int_distribution<int> num(0, 40), den(1, 12);
    for (int trial = 0; trial < 100; ++trial) {
        const RationalVector x{Rational(num(rng), den(rng)), Rational(num(rng), den(rng)), Rational(num(rng), den(rng))};
        RationalVector target(3, Rational(0));
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t p = 0; p < 3; ++p) target[p] += x[i] * g.rows[i][p];
        const auto res = solve_coefficients(g, target);
        const auto* sol = std::get_if<CoefficientSolution>(&res);
        ASSERT_TRUE(sol);
        EXPECT_EQ(sol->coefficients, x);
        EXPECT_TRUE(sol->unique);
        EXPECT_EQ(sol->residual, 0);
    }
}

TEST(Coefficients, GhzIsNotUniqueOverEprsAndGhz) {
    auto g = three_eprs();
    g.add("GHZ", entropy_vector(states::ghz()));
    const auto res = solve_coefficients(g, entropy_vector(states::three_epr()));
    const auto& sol = std::get<CoefficientSolution>(res);
    EXPECT_FALSE(sol.unique);
    ASSERT_TRUE(sol.kernel_direction);
    EXPECT_EQ(*sol.kernel_direction, (RationalVector{1, 1, 1, -2}));
    ASSERT_TRUE(sol.alternative);
    EXPECT_NE(*sol.alternative, sol.coefficients);
    // Both solutions reproduce the target.
    for (const auto* x : {&sol.coefficients, &*sol.alternative})
        for (std::size_t p = 0; p < 3; ++p) {
            Rational s = 0;
            for (std::size_t i = 0; i < 4; ++i) s += (*x)[i] * g.rows[i][p];
            EXPECT_EQ(s, 2);
        }
}

TEST(Coefficients, FourCatOutsideEprCone) {
    auto g = make_entropy_matrix(4);
    const auto f = states::eprs_factors(4);
    for (std::size_t i = 0; i < f.size(); ++i) g.add("e" + std::to_string(i), entropy_vector(f[i]));
    const auto target = to_rational_vector(entropy_vector(states::cat(4)));
    const auto res = solve_coefficients(g, target);
    const auto* inf = std::get_if<Infeasible>(&res);
    ASSERT_TRUE(inf);
    EXPECT_TRUE(verify_certificate(g, target, inf->certificate));
    EXPECT_LT(inf->margin, 0);
}

TEST(Coefficients, Errors) {
    auto g = make_entropy_matrix(3);
    EXPECT_THROW(solve_coefficients(g, RationalVector{1, 1, 1}), std::invalid_argument);
    EXPECT_THROW(g.add("bad", RationalVector{1, 1}), std::invalid_argument);
    EXPECT_THROW(g.add("neg", RationalVector{1, -1, 1}), std::invalid_argument);
    g.add("ok", RationalVector{1, 1, 0});
    EXPECT_THROW(solve_coefficients(g, RationalVector{1, 1}), std::invalid_argument);
    EXPECT_THROW(make_entropy_matrix(1), std::invalid_argument);
}

TEST(Certificate, RejectsBadWitness) {
    const auto g = three_eprs();
    EXPECT_FALSE(verify_certificate(g, RationalVector{1, 1, 1}, RationalVector{1, 1, 1}));
    EXPECT_FALSE(verify_certificate(g, RationalVector{1, 1, 1}, RationalVector{-1, 0, 0}));
    EXPECT_FALSE(verify_certificate(g, RationalVector{1, 1, 1}, RationalVector{1, 1}));
}

TEST(Bounds, KnownValues) {
    const std::vector<std::pair<std::size_t, std::size_t>> want{{3, 3}, {4, 7}, {5, 12}, {6, 31}};
    for (const auto& [m, b] : want) {
        const auto r = mregs_lower_bound(m);
        EXPECT_EQ(r.bound, b) << m;
        EXPECT_EQ(r.baseline, m * (m - 1) / 2);
        for (const auto& s : r.trace)
            if (s.infeasible) {
                EXPECT_LT(s.certificate->margin, 0);
            }
    }
    EXPECT_FALSE(mregs_lower_bound(3).note.empty());
    EXPECT_THROW(mregs_lower_bound(1), std::invalid_argument);
}

TEST(Bounds, CustomProbes) {
    // A probe already inside the cone does not raise the bound.
    const auto r = mregs_lower_bound(3, {{"3EPR", entropy_vector(states::three_epr())}});
    EXPECT_EQ(r.bound, 3u);
    ASSERT_EQ(r.trace.size(), 1u);
    EXPECT_FALSE(r.trace[0].infeasible);
}

TEST(R21Table, ExactRatios) {
    const auto rows = r21_table();
    const std::vector<std::tuple<std::size_t, std::string, Rational>> want{
        {3, "Cat", 1},           {3, "3EPRs", 1},  {4, "Cat", 1},           {4, "6EPRs", Rational(4, 3)},
        {5, "Cat", 1},           {5, "10EPRs", Rational(3, 2)},             {5, "codeword", 2},
        {6, "Cat", 1},           {6, "15EPRs", Rational(8, 5)}};
    ASSERT_EQ(rows.size(), want.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].parties, std::get<0>(want[i]));
        EXPECT_EQ(rows[i].state, std::get<1>(want[i]));
        EXPECT_EQ(rows[i].ratio, std::get<2>(want[i]));
    }
}

TEST(Egs, Examples) {
    EXPECT_TRUE(egs_check(states::ghz()));
    EXPECT_TRUE(egs_check(states::cat(4)));
    EXPECT_FALSE(egs_check(tensor(states::epr(3, 0, 1), states::product_zero({1, 1, 2}))));
    EXPECT_TRUE(egs_check(tensor(states::epr(3, 0, 1), states::epr(3, 1, 2))));
    EXPECT_FALSE(egs_check(tensor(states::epr(4, 0, 1), states::epr(4, 2, 3))));
}
