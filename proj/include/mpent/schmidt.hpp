#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mpent/entropy.hpp"
#include "mpent/state.hpp"

namespace mpent {

/// psi = sum_i coefficients[i] |left_i>|right_i>, coefficients real,
/// positive and descending. Only nonzero terms are kept.
struct SchmidtDecomposition {
    Partition cut;
    std::vector<double> coefficients;
    std::vector<std::vector<cplx>> left_basis;  // over the parties in cut
    std::vector<std::vector<cplx>> right_basis; // over the complement
};

namespace detail {

// Schmidt form of a coefficient matrix c (rows: left side).
inline void schmidt_of_matrix(const Matrix& c, std::vector<double>& coeffs, std::vector<std::vector<cplx>>& left,
                              std::vector<std::vector<cplx>>& right) {
    const bool transpose = c.rows() > c.cols();
    const Matrix a = transpose ? c.transpose() : c; // a.rows() <= a.cols()
    Matrix rho(a.rows(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i; j < a.rows(); ++j) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * std::conj(a(j, k));
            rho(i, j) = acc;
            rho(j, i) = std::conj(acc);
        }
    const auto es = hermitian_eigensystem(rho);
    std::vector<std::vector<cplx>> small_side, big_side;
    for (std::size_t i = 0; i < es.values.size(); ++i) {
        if (es.values[i] <= kEigenZero) break;
        const double lambda = std::sqrt(es.values[i]);
        auto u = es.vectors.column(i);
        // v[b] = sum_a conj(u[a]) a(a,b) / lambda
        std::vector<cplx> v(a.cols());
        for (std::size_t b = 0; b < a.cols(); ++b) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k) s += std::conj(u[k]) * a(k, b);
            v[b] = s / lambda;
        }
        coeffs.push_back(lambda);
        small_side.push_back(std::move(u));
        big_side.push_back(std::move(v));
    }
    if (transpose) {
        left = std::move(big_side);
        right = std::move(small_side);
    } else {
        left = std::move(small_side);
        right = std::move(big_side);
    }
}

} // namespace detail

inline SchmidtDecomposition schmidt_decompose(const PureState& s, const Partition& cut) {
    if (cut.num_parties() != s.num_parties()) throw std::invalid_argument("schmidt_decompose: party count mismatch");
    SchmidtDecomposition d{cut, {}, {}, {}};
    detail::schmidt_of_matrix(coefficient_matrix(s, cut.mask()), d.coefficients, d.left_basis, d.right_basis);
    return d;
}

/// Rebuilds the state vector from a decomposition (same party layout as the source).
inline std::vector<cplx> reconstruct(const SchmidtDecomposition& d, const std::vector<std::size_t>& dims) {
    const auto split = detail::split_index(dims, d.cut.mask());
    std::vector<cplx> amps(split.in.size());
    for (std::size_t g = 0; g < amps.size(); ++g) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < d.coefficients.size(); ++i)
            acc += d.coefficients[i] * d.left_basis[i][split.in[g]] * d.right_basis[i][split.out[g]];
        amps[g] = acc;
    }
    return amps;
}

/// sum_i lambda_i |i_A>|i_B>...|i_M> with per-party orthonormal factors.
struct MOrthogonalForm {
    std::vector<double> coefficients;
    std::vector<std::vector<std::vector<cplx>>> per_party_bases; // [party][term] -> vector
};

inline std::vector<cplx> reconstruct(const MOrthogonalForm& f) {
    std::vector<cplx> amps;
    for (std::size_t i = 0; i < f.coefficients.size(); ++i) {
        std::vector<cplx> term{cplx{f.coefficients[i]}};
        for (const auto& party : f.per_party_bases) term = kron(term, party[i]);
        if (amps.empty()) amps.assign(term.size(), 0.0);
        for (std::size_t k = 0; k < term.size(); ++k) amps[k] += term[k];
    }
    return amps;
}

enum class MOrthogonality { Yes, No, IndeterminateDegenerate };

inline const char* to_string(MOrthogonality m) {
    switch (m) {
    case MOrthogonality::Yes: return "m-orthogonal";
    case MOrthogonality::No: return "not m-orthogonal";
    case MOrthogonality::IndeterminateDegenerate: return "indeterminate (degenerate Schmidt spectrum)";
    }
    return "?";
}

struct MOrthogonalResult {
    MOrthogonality verdict = MOrthogonality::No;
    std::optional<MOrthogonalForm> form;
    std::string reason;
};

/// Decides whether s = sum_i lambda_i |i>^{(x) m} in some local bases.
/// Decomposes across A | rest, checks each right Schmidt vector is a product
/// (every single-party reduction has rank one) and that the factors are
/// pairwise orthogonal party by party. A failed factor test on a degenerate
/// spectrum cannot rule out another basis choice and is reported as such.
inline MOrthogonalResult is_m_orthogonal(const PureState& s, double tol = 1e-8) {
    const std::size_t m = s.num_parties();
    if (m < 2) throw std::invalid_argument("is_m_orthogonal: need at least two parties");
    MOrthogonalResult res;

    const auto ev = entropy_vector(s);
    for (double v : ev.values()) {
        if (std::abs(v - ev.values().front()) > tol) {
            res.reason = "partial entropies differ across partitions";
            return res;
        }
    }

    const auto d = schmidt_decompose(s, Partition(m, {0}));
    bool degenerate = false;
    for (std::size_t i = 0; i + 1 < d.coefficients.size(); ++i) {
        const double p = d.coefficients[i] * d.coefficients[i];
        const double q = d.coefficients[i + 1] * d.coefficients[i + 1];
        if (std::abs(p - q) < tol) degenerate = true;
    }
    auto fail = [&](std::string why) {
        res.verdict = degenerate ? MOrthogonality::IndeterminateDegenerate : MOrthogonality::No;
        res.reason = std::move(why);
        return res;
    };

    MOrthogonalForm form;
    form.coefficients = d.coefficients;
    form.per_party_bases.assign(m, {});
    form.per_party_bases[0] = d.left_basis;

    if (m == 2) {
        form.per_party_bases[1] = d.right_basis;
    } else {
        std::vector<std::size_t> rest_dims(s.dims().begin() + 1, s.dims().end());
        for (std::size_t i = 0; i < d.coefficients.size(); ++i) {
            const PureState w(rest_dims, d.right_basis[i]);
            std::vector<cplx> prod{cplx{1.0}};
            std::vector<std::vector<cplx>> factors;
            for (std::size_t k = 0; k < m - 1; ++k) {
                const auto rho = partial_trace(w, Partition(m - 1, {k}));
                const auto es = hermitian_eigensystem(rho.matrix());
                if (es.values.front() < 1.0 - tol) return fail("Schmidt vector " + std::to_string(i) + " is entangled");
                factors.push_back(es.vectors.column(0));
                prod = kron(prod, factors.back());
            }
            // Absorb the residual phase into the last party's factor.
            const cplx ov = inner(prod, d.right_basis[i]);
            if (std::abs(std::abs(ov) - 1.0) > tol) return fail("Schmidt vector " + std::to_string(i) + " is not a product");
            for (auto& x : factors.back()) x *= ov / std::abs(ov);
            for (std::size_t k = 0; k < m - 1; ++k) form.per_party_bases[k + 1].push_back(std::move(factors[k]));
        }
    }

    for (std::size_t k = 0; k < m; ++k) {
        const auto& b = form.per_party_bases[k];
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = i + 1; j < b.size(); ++j)
                if (std::abs(inner(b[i], b[j])) > tol) {
                    return fail("factors " + std::to_string(i) + "," + std::to_string(j) + " of party " +
                                party_name(k) + " are not orthogonal");
                }
    }

    const auto rebuilt = reconstruct(form);
    if (std::norm(inner(rebuilt, s.amplitudes())) < 1.0 - 1e-9) return fail("reconstruction fidelity too low");

    res.verdict = MOrthogonality::Yes;
    res.form = std::move(form);
    res.reason = "m-orthogonal form found";
    return res;
}

/// Number of m-Cat states per copy asymptotically interconvertible with an
/// m-orthogonal state: its single-party entropy S_A.
inline double cat_yield(const PureState& s) {
    const auto r = is_m_orthogonal(s);
    if (r.verdict != MOrthogonality::Yes) throw DomainError("cat_yield: state is " + std::string(to_string(r.verdict)));
    return shannon_bits([&] {
        std::vector<double> p;
        for (double l : r.form->coefficients) p.push_back(l * l);
        return p;
    }());
}

} // namespace mpent
