#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

// Exact linear programming over the rationals: two-phase simplex with Bland's
// rule on  min c.x  s.t.  A x = b, x >= 0.
namespace mpent::lp {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;
using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>; // row-major

/// Simplest continued-fraction convergent of x within tol.
inline Rational to_rational(double x, double tol = 1e-9) {
    if (!std::isfinite(x)) throw std::invalid_argument("to_rational: non-finite value");
    const bool neg = x < 0;
    double y = std::abs(x);
    Integer h0 = 1, h1 = 0, k0 = 0, k1 = 1; // h_{n-1}, h_{n-2}, ...
    double rest = y;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(rest);
        const Integer ai = static_cast<long long>(a);
        const Integer h = ai * h0 + h1, k = ai * k0 + k1;
        h1 = h0;
        h0 = h;
        k1 = k0;
        k0 = k;
        const Rational r(h, k);
        if (std::abs(static_cast<double>(r) - y) <= tol) return neg ? Rational(-r) : r;
        const double frac = rest - a;
        if (frac <= 0.0) return neg ? Rational(-r) : r;
        rest = 1.0 / frac;
        if (rest > 1e15) return neg ? Rational(-r) : r;
    }
    return neg ? Rational(-Rational(h0, k0)) : Rational(h0, k0);
}

inline bool is_integer(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

inline std::string to_string(const Rational& r) {
    if (is_integer(r)) return boost::multiprecision::numerator(r).str();
    return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

inline Rational dot(const RationalVector& a, const RationalVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
    Status status = Status::Infeasible;
    RationalVector x;         // optimal vertex
    Rational objective = 0;
    RationalVector farkas;    // infeasible: w with w^T A >= 0 and w.b < 0
    RationalVector ray;       // unbounded: d >= 0, A d = 0, c.d < 0
};

/// min c.x  s.t.  A x = b, x >= 0, all exact.
inline Result solve(const RationalMatrix& a, const RationalVector& b, const RationalVector& c) {
    const std::size_t rows = a.size();
    if (b.size() != rows) throw std::invalid_argument("lp::solve: rhs length mismatch");
    const std::size_t n = rows ? a.front().size() : c.size();
    if (c.size() != n) throw std::invalid_argument("lp::solve: cost length mismatch");
    for (const auto& r : a)
        if (r.size() != n) throw std::invalid_argument("lp::solve: ragged matrix");

    // Tableau [A' | I | b'] with rows flipped so that b' >= 0.
    const std::size_t cols = n + rows;
    std::vector<int> sign(rows, 1);
    RationalMatrix t(rows, RationalVector(cols + 1, Rational(0)));
    for (std::size_t i = 0; i < rows; ++i) {
        if (b[i] < 0) sign[i] = -1;
        for (std::size_t j = 0; j < n; ++j) t[i][j] = sign[i] * a[i][j];
        t[i][n + i] = 1;
        t[i][cols] = sign[i] * b[i];
    }
    std::vector<std::size_t> basis(rows);
    for (std::size_t i = 0; i < rows; ++i) basis[i] = n + i;
    std::vector<bool> active(rows, true);

    auto pivot = [&](std::size_t r, std::size_t col, RationalVector& cost) {
        const Rational p = t[r][col];
        for (auto& v : t[r]) v /= p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || !active[i] || t[i][col] == 0) continue;
            const Rational f = t[i][col];
            for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
        }
        if (cost[col] != 0) {
            const Rational f = cost[col];
            for (std::size_t j = 0; j <= cols; ++j) cost[j] -= f * t[r][j];
        }
        basis[r] = col;
    };

    // Reduced-cost row for costs cc (entry `cols` holds -objective).
    auto reduced = [&](const RationalVector& cc) {
        RationalVector r = cc;
        r.resize(cols + 1, Rational(0));
        for (std::size_t i = 0; i < rows; ++i) {
            if (!active[i] || r[basis[i]] == 0) continue;
            const Rational f = r[basis[i]];
            for (std::size_t j = 0; j <= cols; ++j) r[j] -= f * t[i][j];
        }
        return r;
    };

    // Returns the entering column with no positive entry (unbounded), or npos.
    auto iterate = [&](RationalVector& cost, std::size_t allowed) -> std::size_t {
        for (;;) {
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j)
                if (cost[j] < 0) {
                    enter = j;
                    break;
                }
            if (enter == allowed) return static_cast<std::size_t>(-1);
            std::size_t leave = rows;
            Rational best;
            for (std::size_t i = 0; i < rows; ++i) {
                if (!active[i] || t[i][enter] <= 0) continue;
                const Rational ratio = t[i][cols] / t[i][enter];
                if (leave == rows || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == rows) return enter;
            pivot(leave, enter, cost);
        }
    };

    Result res;
    // Phase 1: minimize the sum of artificials.
    RationalVector c1(cols, Rational(0));
    for (std::size_t i = 0; i < rows; ++i) c1[n + i] = 1;
    RationalVector cost = reduced(c1);
    iterate(cost, cols);
    if (-cost[cols] > 0) {
        res.status = Status::Infeasible;
        res.farkas.resize(rows);
        // y_i = 1 - reduced cost of artificial i; w = -y, unflipped.
        for (std::size_t i = 0; i < rows; ++i) res.farkas[i] = -(Rational(1) - cost[n + i]) * sign[i];
        return res;
    }
    // Drive remaining artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < rows; ++i) {
        if (basis[i] < n) continue;
        std::size_t col = n;
        for (std::size_t j = 0; j < n; ++j)
            if (t[i][j] != 0) {
                col = j;
                break;
            }
        if (col == n) active[i] = false;
        else pivot(i, col, cost);
    }

    // Phase 2.
    RationalVector c2(c);
    c2.resize(cols, Rational(0));
    cost = reduced(c2);
    const std::size_t unb = iterate(cost, n);
    if (unb != static_cast<std::size_t>(-1)) {
        res.status = Status::Unbounded;
        res.ray.assign(n, Rational(0));
        res.ray[unb] = 1;
        for (std::size_t i = 0; i < rows; ++i)
            if (active[i] && basis[i] < n) res.ray[basis[i]] = -t[i][unb];
        return res;
    }
    res.status = Status::Optimal;
    res.x.assign(n, Rational(0));
    for (std::size_t i = 0; i < rows; ++i)
        if (active[i]) res.x[basis[i]] = t[i][cols];
    res.objective = dot(c, res.x);
    return res;
}

} // namespace mpent::lp
