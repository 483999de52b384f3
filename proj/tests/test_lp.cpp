#include <gtest/gtest.h>

#include <random>

#include "mpent/lp.hpp"

using namespace mpent::lp;

namespace {

// Solves the square system B y = b exactly; nullopt when singular.
std::optional<RationalVector> solve_square(RationalMatrix m, RationalVector b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(m[c], m[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || m[r][c] == 0) continue;
            const Rational f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
            b[r] -= f * b[c];
        }
    }
    RationalVector y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = b[i] / m[i][i];
    return y;
}

// Minimum over all basic feasible solutions (the region is bounded here).
std::optional<Rational> brute_min(const RationalMatrix& a, const RationalVector& b, const RationalVector& c) {
    const std::size_t rows = a.size(), n = c.size();
    std::optional<Rational> best;
    for (unsigned mask = 0; mask < (1U << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != rows) continue;
        std::vector<std::size_t> cols;
        for (std::size_t j = 0; j < n; ++j)
            if ((mask >> j) & 1U) cols.push_back(j);
        RationalMatrix sq(rows, RationalVector(rows));
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t k = 0; k < rows; ++k) sq[i][k] = a[i][cols[k]];
        const auto y = solve_square(sq, b);
        if (!y) continue;
        bool ok = true;
        Rational obj = 0;
        for (std::size_t k = 0; k < rows; ++k) {
            if ((*y)[k] < 0) ok = false;
            obj += c[cols[k]] * (*y)[k];
        }
        if (ok && (!best || obj < *best)) best = obj;
    }
    return best;
}

} // namespace

TEST(Lp, MatchesVertexEnumeration) {
    std::mt19937_64 rng(71);
    std::uniform_int_distribution<int> coef(-4, 6), rhs(-3, 8), cost(-5, 5);
    int feasible = 0, infeasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t rows = 2 + trial % 2, n = 4 + trial % 3;
        RationalMatrix a(rows, RationalVector(n));
        RationalVector b(rows), c(n);
        // Row 0 has positive coefficients, which bounds the region.
        for (std::size_t j = 0; j < n; ++j) a[0][j] = 1 + std::abs(coef(rng)) % 3;
        b[0] = 1 + std::abs(rhs(rng));
        for (std::size_t i = 1; i < rows; ++i) {
            for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(coef(rng), 1 + std::abs(coef(rng)) % 3);
            b[i] = rhs(rng);
        }
        for (auto& x : c) x = cost(rng);
        const auto res = solve(a, b, c);
        const auto oracle = brute_min(a, b, c);
        ASSERT_NE(res.status, Status::Unbounded);
        if (!oracle) {
            ++infeasible;
            ASSERT_EQ(res.status, Status::Infeasible);
            for (std::size_t j = 0; j < n; ++j) {
                Rational s = 0;
                for (std::size_t i = 0; i < rows; ++i) s += res.farkas[i] * a[i][j];
                EXPECT_GE(s, 0);
            }
            EXPECT_LT(dot(res.farkas, b), 0);
        } else {
            ++feasible;
            ASSERT_EQ(res.status, Status::Optimal);
            EXPECT_EQ(res.objective, *oracle);
            for (std::size_t i = 0; i < rows; ++i) EXPECT_EQ(dot(a[i], res.x), b[i]);
            for (const auto& x : res.x) EXPECT_GE(x, 0);
        }
    }
    EXPECT_GT(feasible, 30);
    EXPECT_GT(infeasible, 10);
}

TEST(Lp, Unbounded) {
    // x0 - x1 = 1, minimize -x0.
    const auto r = solve({{1, -1}}, {1}, {-1, 0});
    ASSERT_EQ(r.status, Status::Unbounded);
    EXPECT_EQ(r.ray[0] - r.ray[1], 0);
    EXPECT_LT(-r.ray[0], 0);
}

TEST(Lp, RedundantRows) {
    const auto r = solve({{1, 1}, {2, 2}}, {1, 2}, {1, 2});
    ASSERT_EQ(r.status, Status::Optimal);
    EXPECT_EQ(r.objective, 1);
    EXPECT_EQ(r.x[0], 1);
}

TEST(Lp, ShapeErrors) {
    EXPECT_THROW(solve({{1, 1}}, {1, 2}, {0, 0}), std::invalid_argument);
    EXPECT_THROW(solve({{1, 1}}, {1}, {0}), std::invalid_argument);
    EXPECT_THROW(solve({{1, 1}, {1}}, {1, 1}, {0, 0}), std::invalid_argument);
}

TEST(Rational, FromDouble) {
    EXPECT_EQ(to_rational(0.5), Rational(1, 2));
    EXPECT_EQ(to_rational(4.0 / 3.0), Rational(4, 3));
    EXPECT_EQ(to_rational(-1.6), Rational(-8, 5));
    EXPECT_EQ(to_rational(2.0000000001), Rational(2));
    EXPECT_EQ(to_string(Rational(8, 5)), "8/5");
    EXPECT_EQ(to_string(Rational(3)), "3");
    EXPECT_THROW(to_rational(std::nan("")), std::invalid_argument);
}
