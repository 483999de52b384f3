#include <gtest/gtest.h>

#include <random>

#include "mpent/schmidt.hpp"
#include "mpent/states.hpp"

using namespace mpent;

TEST(Schmidt, ReconstructsRandomStates) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const std::vector<std::size_t> dims{2, 3, std::size_t(1 + trial % 3)};
        const auto s = states::random_state(dims, rng);
        for (const auto& cut : canonical_partitions(3)) {
            const auto d = schmidt_decompose(s, cut);
            const auto back = reconstruct(d, dims);
            for (std::size_t g = 0; g < back.size(); ++g) EXPECT_LT(std::abs(back[g] - s.amplitude(g)), 1e-10);
            double total = 0.0;
            for (std::size_t i = 0; i < d.coefficients.size(); ++i) {
                total += d.coefficients[i] * d.coefficients[i];
                if (i) {
                    EXPECT_GE(d.coefficients[i - 1], d.coefficients[i]);
                }
                EXPECT_GT(d.coefficients[i], 0.0);
            }
            EXPECT_NEAR(total, 1.0, 1e-10);
        }
    }
}

TEST(Schmidt, CoefficientsOfEpr) {
    const auto d = schmidt_decompose(states::epr(), Partition(2, {0}));
    ASSERT_EQ(d.coefficients.size(), 2u);
    EXPECT_NEAR(d.coefficients[0], 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(d.coefficients[1], 1 / std::sqrt(2.0), 1e-12);
    const auto p = schmidt_decompose(states::product_zero({2, 3}), Partition(2, {1}));
    EXPECT_EQ(p.coefficients.size(), 1u);
}

TEST(MOrthogonal, RecognizesRotatedForms) {
    std::mt19937_64 rng(32);
    for (std::size_t m : {2u, 3u, 4u}) {
        auto s = states::m_orthogonal({0.6, 0.3, 0.1}, m);
        for (std::size_t p = 0; p < m; ++p) s = apply_local(s, p, states::random_unitary(3, rng));
        const auto r = is_m_orthogonal(s);
        ASSERT_EQ(r.verdict, MOrthogonality::Yes) << r.reason;
        const auto back = reconstruct(*r.form);
        EXPECT_NEAR(std::norm(inner(back, s.amplitudes())), 1.0, 1e-9);
        EXPECT_NEAR(r.form->coefficients[0] * r.form->coefficients[0], 0.6, 1e-9);
    }
}

TEST(MOrthogonal, RejectsNonForms) {
    // Unequal partial entropies rule out the form outright.
    const auto chain = tensor(states::epr(3, 0, 1), states::epr(3, 1, 2));
    EXPECT_EQ(is_m_orthogonal(chain).verdict, MOrthogonality::No);
    EXPECT_EQ(is_m_orthogonal(states::codeword5()).verdict, MOrthogonality::No);
    // W: all single-party entropies equal h(1/3), nondegenerate, yet no
    // product Schmidt vectors.
    const auto w = make_state({2, 2, 2}, {{{1, 0, 0}, 1.0}, {{0, 1, 0}, 1.0}, {{0, 0, 1}, 1.0}});
    const auto r = is_m_orthogonal(w);
    EXPECT_EQ(r.verdict, MOrthogonality::No) << r.reason;
}

TEST(MOrthogonal, DegenerateCatIsHandled) {
    const auto r = is_m_orthogonal(states::ghz());
    EXPECT_NE(r.verdict, MOrthogonality::No);
    EXPECT_NE(std::string(to_string(MOrthogonality::IndeterminateDegenerate)).find("degenerate"), std::string::npos);
}

TEST(CatYield, EqualsSingleEntropy) {
    EXPECT_NEAR(cat_yield(states::m_orthogonal({0.75, 0.25}, 3)), 0.8112781244591328, 1e-10);
    EXPECT_THROW(cat_yield(tensor(states::epr(3, 0, 1), states::epr(3, 1, 2))), DomainError);
}
