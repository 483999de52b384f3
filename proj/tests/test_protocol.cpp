#include <gtest/gtest.h>

#include "mpent/protocol.hpp"
#include "mpent/protocols.hpp"
#include "random_protocols.hpp"

using namespace mpent;

TEST(Run, EmptyProtocolIsIdentity) {
    const auto r = run({}, states::ghz());
    ASSERT_EQ(r.branches.size(), 1u);
    EXPECT_NEAR(r.branches[0].probability, 1.0, 1e-15);
    EXPECT_NEAR(fidelity(r.branches[0].state, states::ghz()), 1.0, 1e-15);
    EXPECT_TRUE(r.branches[0].transcript.empty());
}

TEST(Run, HadamardMeasurementOnGhz) {
    const double s = 1 / std::sqrt(2.0);
    const Matrix plus = Matrix::projector(std::vector<cplx>{s, s}), minus = Matrix::projector(std::vector<cplx>{s, -s});
    const Protocol p{LocalMeasurement{2, "C", {plus, minus}, {"+", "-"}}};
    const auto r = run(p, states::ghz());
    ASSERT_EQ(r.branches.size(), 2u);
    EXPECT_EQ(to_string(r.branches[0].transcript), "C=+");
    EXPECT_EQ(to_string(r.branches[1].transcript), "C=-");
    for (const auto& b : r.branches) {
        EXPECT_NEAR(b.probability, 0.5, 1e-12);
        // AB is left in an EPR pair (up to Z on the '-' branch).
        EXPECT_NEAR(entropy_vector(b.state).single(0), 1.0, 1e-10);
        EXPECT_NEAR(entropy_vector(b.state).single(2), 0.0, 1e-10);
    }
    EXPECT_EQ(classical_bits(p), 1u);
}

TEST(Run, PrunesImpossibleOutcomes) {
    const Protocol p{computational_measurement(0, "a", {2}, {0})};
    const auto r = run(p, states::product_zero({2, 2}));
    ASSERT_EQ(r.branches.size(), 1u);
    EXPECT_EQ(r.branches[0].transcript[0].label, "0");
}

TEST(Run, RejectsBadSteps) {
    const auto in = states::ghz();
    EXPECT_THROW(run({LocalUnitary{0, Matrix{{1, 1}, {0, 1}}}}, in), DomainError);
    EXPECT_THROW(run({LocalUnitary{0, Matrix::identity(3)}}, in), DomainError);
    EXPECT_THROW(run({LocalMeasurement{0, "a", {Matrix{{1, 0}, {0, 0}}}, {"0"}}}, in), DomainError);
    EXPECT_THROW(run({LocalMeasurement{0, "", {Matrix::identity(2)}, {"0"}}}, in), std::invalid_argument);
    EXPECT_THROW(run({LocalMeasurement{0, "a", {Matrix{{1, 0}, {0, 0}}, Matrix{{0, 0}, {0, 1}}}, {"x", "x"}}}, in),
                 std::invalid_argument);
    EXPECT_THROW(run({LocalMeasurement{0, "a", {Matrix{{1, 1}, {1, 1}} * 0.5, Matrix{{0, 0}, {0, 1}}}, {"x", "y"}}}, in),
                 DomainError);
    EXPECT_THROW(run({LocalUnitary{5, Matrix::identity(2)}}, in), std::invalid_argument);
}

TEST(Run, IncompleteConditioningTable) {
    Protocol p{computational_measurement(0, "a", {2}, {0})};
    p.push_back(ConditionedUnitary{1, {"a"}, {{"0", gates::I2()}}});
    try {
        run(p, states::ghz());
        FAIL() << "expected an error";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("incomplete conditioning table"), std::string::npos);
    }
    EXPECT_THROW(run({ConditionedUnitary{1, {"nope"}, {{"0", gates::I2()}}}}, states::ghz()), DomainError);
}

TEST(Run, DiscardRequiresProductFactor) {
    // Party A holds two qubits: one in an EPR with B, one in |0>.
    const auto s = tensor(states::epr(), states::product_zero({2, 1}));
    const auto ok = run({DiscardSubsystem{0, {2, 2}, 1}}, s);
    EXPECT_EQ(ok.branches[0].state.dims(), (std::vector<std::size_t>{2, 2}));
    EXPECT_NEAR(fidelity(ok.branches[0].state, states::epr()), 1.0, 1e-12);
    EXPECT_THROW(run({DiscardSubsystem{0, {2, 2}, 0}}, s), DomainError);
    EXPECT_THROW(run({DiscardSubsystem{0, {3, 2}, 0}}, s), DomainError);
}

TEST(Run, EntropyNeverIncreasesOnAverage) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const auto in = states::random_state({2, 2, 2}, rng);
        const auto p = testkit::random_protocol(3, 8, rng);
        const auto r = run(p, in);
        double total = 0.0;
        for (const auto& b : r.branches) total += b.probability;
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_LE(entropy_monotonicity_slack(r), 1e-8);
    }
}

TEST(Run, UnitariesConserveEntropies) {
    std::mt19937_64 rng(42);
    const auto in = states::random_state({2, 3, 2}, rng);
    Protocol p;
    for (std::size_t q = 0; q < 3; ++q) p.push_back(LocalUnitary{q, states::random_unitary(in.dim(q), rng)});
    const auto r = run(p, in);
    ASSERT_EQ(r.branches.size(), 1u);
    const auto a = entropy_vector(in), b = entropy_vector(r.branches[0].state);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-9);
    EXPECT_NEAR(entropy_monotonicity_slack(r), 0.0, 1e-9);
}

TEST(Embed, ActsOnChosenFactors) {
    // X on the middle qubit of three.
    const Matrix x3 = embed(gates::X(), {2, 2, 2}, {1});
    EXPECT_LT((x3 - kron(kron(gates::I2(), gates::X()), gates::I2())).frobenius_norm(), 1e-15);
    // CNOT with control factor 2 and target factor 0: |1 0 1> -> |0 0 1> ... check one column.
    const Matrix c = embed(gates::CNOT(), {2, 2, 2}, {2, 0});
    EXPECT_EQ(c(0b100, 0b001), cplx{0.0});
    EXPECT_EQ(c(0b101, 0b001), cplx{1.0});
    // Output dims can change: isometry 2 -> 4 on factor 0 of (2,3).
    Matrix v(4, 2);
    v(0, 0) = 1;
    v(3, 1) = 1;
    const Matrix e = embed(v, {2, 3}, {0}, {4});
    EXPECT_EQ(e.rows(), 12u);
    EXPECT_EQ(e.cols(), 6u);
    EXPECT_TRUE(e.is_isometry(1e-12));
    EXPECT_THROW(embed(gates::CNOT(), {2, 3}, {0, 1}), std::invalid_argument);
}

TEST(ComputationalMeasurement, LabelsAndCompleteness) {
    const auto m = computational_measurement(0, "z", {2, 3, 2}, {1, 2});
    ASSERT_EQ(m.labels.size(), 6u);
    EXPECT_EQ(m.labels.front(), "00");
    EXPECT_EQ(m.labels.back(), "21");
    Matrix sum(12, 12);
    for (const auto& p : m.projectors) sum += p;
    EXPECT_LT((sum - Matrix::identity(12)).frobenius_norm(), 1e-15);
}

TEST(DilatePovm, ReproducesKrausStatistics) {
    // Unsharp Z measurement on A's half of an EPR pair.
    const double a = std::sqrt(0.8), b = std::sqrt(0.2);
    const Matrix k0{{a, 0}, {0, b}}, k1{{b, 0}, {0, a}};
    const auto p = protocols::dilate_povm(0, {2}, 0, {k0, k1}, {"up", "down"}, "m");
    const auto r = run(p, states::epr());
    ASSERT_EQ(r.branches.size(), 2u);
    for (const auto& br : r.branches) {
        EXPECT_NEAR(br.probability, 0.5, 1e-12);
        EXPECT_EQ(br.state.dims(), (std::vector<std::size_t>{2, 2}));
        // Post-measurement Schmidt probabilities are (0.8, 0.2).
        EXPECT_NEAR(entropy_vector(br.state).single(0), shannon_bits(std::vector<double>{0.8, 0.2}), 1e-9);
    }
    EXPECT_EQ(to_string(r.branches[0].transcript), "m=down");
    EXPECT_THROW(protocols::dilate_povm(0, {2}, 0, {k0}, {"a", "b"}, "m"), std::invalid_argument);
}

TEST(Layout, Bookkeeping) {
    Layout l(2);
    l.add(0, "x", 2);
    l.add(0, "y", 4);
    EXPECT_EQ(l.dim(0), 8u);
    EXPECT_EQ(l.dim(1), 1u);
    l.split(0, "y", {{"y1", 2}, {"y2", 2}});
    EXPECT_EQ(l.position(0, "y2"), 2u);
    const auto d = l.discard(0, "y1");
    EXPECT_EQ(d.index, 1u);
    EXPECT_EQ(d.subdims, (std::vector<std::size_t>{2, 2, 2}));
    EXPECT_EQ(l.subdims(0), (std::vector<std::size_t>{2, 2}));
    EXPECT_THROW(l.position(0, "y1"), std::invalid_argument);
    EXPECT_THROW(l.split(0, "x", {{"a", 3}}), std::invalid_argument);
}
