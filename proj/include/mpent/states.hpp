#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "mpent/state.hpp"

// Builders for the standard states: EPR pairs, Cat/GHZ states, complete-graph
// EPR collections, the five-qubit codeword and Haar-random states.
namespace mpent::states {

/// |00> + |11> between parties i and j of an m-party system; every other
/// party is a bystander of dimension 1.
inline PureState epr(std::size_t m, std::size_t i, std::size_t j) {
    if (m < 2 || i >= m || j >= m || i == j) throw std::invalid_argument("epr: need distinct parties i, j < m");
    std::vector<std::size_t> dims(m, 1);
    dims[i] = dims[j] = 2;
    std::vector<std::size_t> zero(m, 0), one(m, 0);
    one[i] = one[j] = 1;
    return make_state(dims, {{zero, 1.0}, {one, 1.0}});
}

inline PureState epr() { return epr(2, 0, 1); }

/// |0...0> + |1...1> over `members`, bystanders elsewhere.
inline PureState cat_on(std::size_t m, const std::vector<std::size_t>& members) {
    if (members.size() < 2) throw std::invalid_argument("cat_on: need at least two members");
    std::vector<std::size_t> dims(m, 1);
    for (auto p : members) {
        if (p >= m) throw std::invalid_argument("cat_on: member out of range");
        if (dims[p] == 2) throw std::invalid_argument("cat_on: repeated member");
        dims[p] = 2;
    }
    std::vector<std::size_t> zero(m, 0), one(m, 0);
    for (auto p : members) one[p] = 1;
    return make_state(dims, {{zero, 1.0}, {one, 1.0}});
}

/// m-party Cat state |0^m> + |1^m>.
inline PureState cat(std::size_t m) {
    if (m < 2) throw std::invalid_argument("cat: m must be at least 2");
    std::vector<std::size_t> members(m);
    for (std::size_t i = 0; i < m; ++i) members[i] = i;
    return cat_on(m, members);
}

inline PureState ghz() { return cat(3); }

inline PureState two_ghz() { return tensor(ghz(), ghz()); }

/// One EPR pair per pair of parties, kept as separate factors. Ordered
/// (0,1), (0,2), ..., (m-2,m-1).
inline std::vector<PureState> eprs_factors(std::size_t m) {
    std::vector<PureState> out;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) out.push_back(epr(m, i, j));
    return out;
}

/// Dense complete-graph EPR state; each party holds m-1 qubits.
inline PureState eprs(std::size_t m) {
    const auto f = eprs_factors(m);
    PureState s = f.front();
    for (std::size_t i = 1; i < f.size(); ++i) s = tensor(s, f[i]);
    return s;
}

/// EPR^AB (x) EPR^BC (x) EPR^CA with each party holding two qubits.
inline PureState three_epr() { return tensor(tensor(epr(3, 0, 1), epr(3, 1, 2)), epr(3, 2, 0)); }

/// sum_i sqrt(p_i) |i>^{(x) m}.
inline PureState m_orthogonal(const std::vector<double>& probabilities, std::size_t m) {
    if (m < 2) throw std::invalid_argument("m_orthogonal: m must be at least 2");
    const std::size_t r = probabilities.size();
    std::vector<BasisTerm> terms;
    for (std::size_t i = 0; i < r; ++i) {
        if (probabilities[i] < 0) throw std::invalid_argument("m_orthogonal: negative probability");
        terms.push_back({std::vector<std::size_t>(m, i), std::sqrt(probabilities[i])});
    }
    return make_state(std::vector<std::size_t>(m, r), terms);
}

/// |0...0> with the given local dimensions.
inline PureState product_zero(const std::vector<std::size_t>& dims) {
    return make_state(dims, {{std::vector<std::size_t>(dims.size(), 0), 1.0}});
}

/// Logical |0> of the [[5,1,3]] code: projection of |00000> onto the code
/// space stabilized by the cyclic shifts of XZZXI. Every one- and two-party
/// reduction is maximally mixed.
inline PureState codeword5() {
    constexpr std::size_t n = 5;
    // Pauli string as (x bits, z bits); qubit 0 is the most significant.
    struct Pauli {
        unsigned x = 0, z = 0;
    };
    auto bit = [](std::size_t q) { return 1U << (n - 1 - q); };
    std::vector<Pauli> gens;
    for (std::size_t s = 0; s < 4; ++s) {
        Pauli g;
        const char* pattern = "XZZXI";
        for (std::size_t q = 0; q < n; ++q) {
            const char c = pattern[(q + n - s) % n];
            if (c == 'X') g.x |= bit(q);
            if (c == 'Z') g.z |= bit(q);
        }
        gens.push_back(g);
    }
    // P = prod (I + g)/2 applied to |00000>: sum over the 16 group elements.
    std::vector<cplx> amps(1U << n);
    for (unsigned sel = 0; sel < 16; ++sel) {
        // Multiply the selected generators; track the phase of X^x Z^z form.
        unsigned x = 0, z = 0;
        cplx phase = 1.0;
        for (std::size_t g = 0; g < 4; ++g) {
            if (!((sel >> g) & 1U)) continue;
            // (X^x Z^z)(X^gx Z^gz) = (-1)^{|z & gx|} X^{x^gx} Z^{z^gz}
            if (std::popcount(z & gens[g].x) % 2) phase = -phase;
            x ^= gens[g].x;
            z ^= gens[g].z;
        }
        // X^x Z^z |0> = X^x |0> = |x>
        amps[x] += phase;
    }
    return PureState::normalized(std::vector<std::size_t>(n, 2), std::move(amps));
}

inline std::vector<cplx> random_vector(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> v(d);
    for (auto& x : v) x = cplx(g(rng), g(rng));
    return v;
}

/// Haar-random pure state.
inline PureState random_state(const std::vector<std::size_t>& dims, std::mt19937_64& rng) {
    return PureState::normalized(dims, random_vector(product(dims), rng));
}

/// Haar-random d x d unitary (Gram-Schmidt on a complex Gaussian matrix).
inline Matrix random_unitary(std::size_t d, std::mt19937_64& rng) {
    Matrix u(d, d);
    for (std::size_t c = 0; c < d; ++c) {
        auto v = random_vector(d, rng);
        for (std::size_t k = 0; k < c; ++k) {
            const auto col = u.column(k);
            const cplx proj = inner(col, v);
            for (std::size_t r = 0; r < d; ++r) v[r] -= proj * col[r];
        }
        const double nv = std::sqrt(norm2(v));
        for (std::size_t r = 0; r < d; ++r) u(r, c) = v[r] / nv;
    }
    return u;
}

} // namespace mpent::states
