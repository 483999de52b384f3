#include <gtest/gtest.h>

#include "majorization_oracle.hpp"
#include "mpent/reducibility.hpp"

using namespace mpent;

namespace {

PureState bipartite(const std::vector<double>& probs) {
    std::vector<BasisTerm> terms;
    for (std::size_t i = 0; i < probs.size(); ++i) terms.push_back({{i, i}, std::sqrt(probs[i])});
    return make_state({probs.size(), probs.size()}, terms);
}

double binary_entropy(double x) { return shannon_bits(std::vector<double>{x, 1 - x}); }

} // namespace

TEST(Majorization, Examples) {
    EXPECT_TRUE(majorizes({1.0, 0.0}, {0.5, 0.5}));
    EXPECT_FALSE(majorizes({0.5, 0.5}, {1.0, 0.0}));
    EXPECT_TRUE(majorizes({0.5, 0.5}, {0.5, 0.5}));
    EXPECT_TRUE(majorizes({0.7, 0.3}, {0.5, 0.25, 0.25}));
    EXPECT_FALSE(majorizes({0.5, 0.25, 0.25}, {0.7, 0.3}));
    // Nielsen's incomparable pair.
    EXPECT_FALSE(majorizes({0.4, 0.4, 0.1, 0.1}, {0.5, 0.25, 0.25}));
    EXPECT_FALSE(majorizes({0.5, 0.25, 0.25}, {0.4, 0.4, 0.1, 0.1}));
}

TEST(Majorization, AgreesWithSubsetOracle) {
    std::mt19937_64 rng(61);
    int forward = 0, mutual = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto [p, q] = testkit::random_spectrum_pair(rng);
        const bool m_pq = majorizes(p, q), m_qp = majorizes(q, p);
        ASSERT_EQ(m_pq, testkit::oracle_majorizes(p, q));
        ASSERT_EQ(m_qp, testkit::oracle_majorizes(q, p));
        EXPECT_EQ(m_pq && m_qp, same_spectrum(p, q));
        forward += m_pq;
        mutual += m_pq && m_qp;
    }
    EXPECT_GT(forward, 100);
    EXPECT_GT(mutual, 50);
}

TEST(Bipartite, ReducibilityExamples) {
    const auto epr = states::epr(), prod = states::product_zero({2, 2});
    EXPECT_TRUE(exact_bipartite_reducible(epr, prod));
    EXPECT_FALSE(exact_bipartite_reducible(prod, epr));
    EXPECT_TRUE(exact_bipartite_reducible(epr, bipartite({0.9, 0.1})));
    EXPECT_TRUE(lu_equivalent_bipartite(epr, apply_local(epr, 1, Matrix{{0, 1}, {1, 0}})));
    const auto a = bipartite({0.4, 0.4, 0.1, 0.1}), b = bipartite({0.5, 0.25, 0.25, 0.0});
    EXPECT_FALSE(exact_bipartite_reducible(a, b));
    EXPECT_FALSE(exact_bipartite_reducible(b, a));
    EXPECT_THROW(exact_bipartite_reducible(states::ghz(), states::ghz()), std::invalid_argument);
    EXPECT_TRUE(exact_bipartite_reducible(states::ghz(), states::epr(3, 0, 1), Partition(3, {0})));
}

TEST(Bipartite, IsentropicButNotIsospectral) {
    // (1-2y, y, y) with entropy exactly one bit: h(2y) + 2y = 1.
    double lo = 0.0, hi = 0.25;
    for (int it = 0; it < 200; ++it) {
        const double y = 0.5 * (lo + hi);
        (binary_entropy(2 * y) + 2 * y < 1.0 ? lo : hi) = y;
    }
    const double y = 0.5 * (lo + hi);
    const auto psi = bipartite({0.5, 0.5, 0.0}), phi = bipartite({1 - 2 * y, y, y});
    EXPECT_NEAR(entropy_vector(psi).single(0), entropy_vector(phi).single(0), 1e-9);
    EXPECT_FALSE(exact_bipartite_reducible(psi, phi));
    EXPECT_FALSE(exact_bipartite_reducible(phi, psi));
    EXPECT_EQ(classify_pair(psi, phi).verdict, Verdict::Incomparable);
}

TEST(Ppt, Examples) {
    const auto e = ppt_test(projector_of(states::epr()));
    EXPECT_FALSE(e.is_ppt);
    EXPECT_NEAR(e.min_eigenvalue, -0.5, 1e-12);
    const std::vector<double> want{0.5, 0.5, 0.5, -0.5};
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(e.eigenvalues[i], want[i], 1e-12);
    EXPECT_TRUE(ppt_test(Matrix::identity(4) * 0.25).is_ppt);
    EXPECT_TRUE(ppt_test(projector_of(states::product_zero({2, 2}))).is_ppt);
    // Werner state p|EPR><EPR| + (1-p) I/4 is NPT iff p > 1/3.
    const Matrix epr = projector_of(states::epr()).matrix();
    for (double p : {0.3, 0.34}) {
        const Matrix w = epr * p + Matrix::identity(4) * ((1 - p) / 4);
        EXPECT_EQ(ppt_test(w).is_ppt, p < 1.0 / 3.0);
    }
    EXPECT_THROW(ppt_test(Matrix::identity(3)), std::invalid_argument);
}

TEST(PartialTranspose, IsInvolutive) {
    std::mt19937_64 rng(62);
    const auto s = states::random_state({2, 3}, rng);
    const Matrix rho = projector_of(s).matrix();
    const Matrix t = partial_transpose(rho, 2, 3);
    EXPECT_LT((partial_transpose(t, 2, 3) - rho).frobenius_norm(), 1e-15);
    EXPECT_NEAR(t(0 * 3 + 1, 1 * 3 + 2).real(), rho(0 * 3 + 2, 1 * 3 + 1).real(), 1e-15);
}

TEST(Classify, LocalUnitaryPairs) {
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 10; ++trial) {
        const auto psi = states::random_state({2, 2, 2}, rng);
        auto phi = psi;
        for (std::size_t p = 0; p < 3; ++p) phi = apply_local(phi, p, states::random_unitary(2, rng));
        EXPECT_EQ(classify_pair(psi, phi).verdict, Verdict::LUEquivalent);
    }
    EXPECT_EQ(classify_pair(states::ghz(), states::ghz()).verdict, Verdict::LUEquivalent);
}

TEST(Classify, BipartiteDirections) {
    const auto a = bipartite({0.5, 0.5}), b = bipartite({0.8, 0.2});
    EXPECT_EQ(classify_pair(a, b).verdict, Verdict::ReducibleAtoB);
    EXPECT_EQ(classify_pair(b, a).verdict, Verdict::ReducibleBtoA);
}

TEST(Classify, UnequalMarginalsAreUndecided) {
    const auto ab = tensor(states::epr(3, 0, 1), states::product_zero({1, 1, 2}));
    const auto bc = tensor(states::epr(3, 1, 2), states::product_zero({2, 1, 1}));
    const auto r = classify_pair(ab, bc);
    EXPECT_EQ(r.verdict, Verdict::Unknown);
    EXPECT_TRUE(r.evidence.entropy_monotonicity_incomparable);
    // GHZ dominates EPR^AB entrywise: not flagged.
    const auto r2 = classify_pair(states::ghz(), states::epr(3, 0, 1));
    EXPECT_EQ(r2.verdict, Verdict::Unknown);
    EXPECT_FALSE(r2.evidence.entropy_monotonicity_incomparable);
}

TEST(Classify, MarginallyIsentropicOnly) {
    // Both have unit marginals; S_AB is 1 for the Cat and 0 for the pairs.
    const auto cat = states::cat(4);
    const auto pairs = tensor(states::epr(4, 0, 1), states::epr(4, 2, 3));
    const auto r = classify_pair(cat, pairs);
    EXPECT_EQ(r.verdict, Verdict::IncomparableByEntropy);
    ASSERT_TRUE(r.evidence.witness);
}

TEST(Witness, GhzVersusEprs) {
    const auto w = ghz_epr_witness();
    EXPECT_TRUE(w.all_two_bits);
    // rho_BC(2GHZ) = (diag(1/2, 0, 0, 1/2))^{(x)2}: four eigenvalues 1/4.
    ASSERT_EQ(w.rho_bc_2ghz_eigenvalues.size(), 16u);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(w.rho_bc_2ghz_eigenvalues[i], i < 4 ? 0.25 : 0.0, 1e-12);
    EXPECT_NEAR(w.rho_bc_2ghz_offdiagonal, 0.0, 1e-15);
    EXPECT_GE(w.rho_bc_2ghz_pt_min, -1e-12);
    EXPECT_NEAR(w.rho_bc_2ghz_deviation, 0.25 - 1.0 / 16.0, 1e-12);
    EXPECT_NEAR(w.epr_factor_fidelity, 1.0, 1e-12);
    EXPECT_FALSE(w.epr_factor_ppt.is_ppt);
    EXPECT_NEAR(w.epr_factor_ppt.min_eigenvalue, -0.5, 1e-9);
    EXPECT_EQ(w.verdict.verdict, Verdict::Incomparable);
}
