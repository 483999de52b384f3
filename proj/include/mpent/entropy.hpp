#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpent/state.hpp"

namespace mpent {

// Eigenvalues below this are exact zeros before taking logs.
inline constexpr double kEigenZero = 1e-12;
inline constexpr double kEntropyTolerance = 1e-8;

/// Shannon entropy in bits of a probability vector, with 0 log 0 = 0.
inline double shannon_bits(std::span<const double> p) {
    double h = 0.0;
    for (double x : p)
        if (x > kEigenZero) h -= x * std::log2(x);
    return std::max(h, 0.0);
}

/// Von Neumann entropy -tr(rho log2 rho) in bits.
inline double entropy(const DensityMatrix& rho) { return shannon_bits(hermitian_eigenvalues(rho.matrix())); }

/// Eigenvalues (descending) of rho_X, computed on whichever side of the cut
/// has the smaller dimension; both sides share the nonzero spectrum.
inline std::vector<double> reduced_spectrum(const PureState& s, const Partition& cut) {
    if (cut.num_parties() != s.num_parties()) throw std::invalid_argument("reduced_spectrum: party count mismatch");
    const Matrix c = coefficient_matrix(s, cut.mask());
    const bool rows_side = c.rows() <= c.cols();
    const std::size_t n = rows_side ? c.rows() : c.cols();
    const std::size_t k_len = rows_side ? c.cols() : c.rows();
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < k_len; ++k) {
                acc += rows_side ? c(i, k) * std::conj(c(j, k)) : std::conj(c(k, i)) * c(k, j);
            }
            g(i, j) = acc;
            g(j, i) = std::conj(acc);
        }
    auto ev = hermitian_eigenvalues(g);
    for (auto& x : ev)
        if (x < 0 && x > -1e-12) x = 0.0;
    return ev;
}

inline double partial_entropy(const PureState& s, const Partition& x) { return shannon_bits(reduced_spectrum(s, x)); }

/// Partial entropy of every canonical nontrivial partition.
class EntropyVector {
  public:
    EntropyVector(std::size_t num_parties, std::vector<double> values)
        : m_(num_parties), partitions_(canonical_partitions(num_parties)), values_(std::move(values)) {
        if (values_.size() != partitions_.size()) {
            throw std::invalid_argument("EntropyVector: expected " + std::to_string(partitions_.size()) + " entries");
        }
    }

    std::size_t num_parties() const { return m_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<Partition>& partitions() const { return partitions_; }
    const std::vector<double>& values() const { return values_; }

    /// S_X for any nontrivial X (S_X = S_Xbar for pure states).
    double at(const Partition& x) const {
        const Partition c = x.canonical();
        for (std::size_t i = 0; i < partitions_.size(); ++i)
            if (partitions_[i] == c) return values_[i];
        throw std::invalid_argument("EntropyVector: partition not found");
    }
    double single(std::size_t party) const { return at(Partition(m_, {party})); }

    EntropyVector& operator+=(const EntropyVector& o) {
        if (o.m_ != m_) throw std::invalid_argument("EntropyVector: party count mismatch");
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    friend EntropyVector operator+(EntropyVector a, const EntropyVector& b) { return a += b; }

  private:
    std::size_t m_;
    std::vector<Partition> partitions_;
    std::vector<double> values_;
};

inline EntropyVector entropy_vector(const PureState& s) {
    if (s.num_parties() < 2) throw std::invalid_argument("entropy_vector: need at least two parties");
    const auto parts = canonical_partitions(s.num_parties());
    std::vector<double> v;
    v.reserve(parts.size());
    for (const auto& x : parts) v.push_back(partial_entropy(s, x));
    return EntropyVector(s.num_parties(), std::move(v));
}

/// Entropy vector of the tensor product of independent factors over the same
/// parties: partial entropies add across factors.
inline EntropyVector entropy_vector(std::span<const PureState> factors) {
    if (factors.empty()) throw std::invalid_argument("entropy_vector: no factors");
    EntropyVector acc = entropy_vector(factors.front());
    for (std::size_t i = 1; i < factors.size(); ++i) acc += entropy_vector(factors[i]);
    return acc;
}

inline bool same_entropies(const EntropyVector& a, const EntropyVector& b, bool marginal_only,
                           double tol = kEntropyTolerance) {
    if (a.num_parties() != b.num_parties()) throw std::invalid_argument("isentropy: party-count mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (marginal_only && a.partitions()[i].size() != 1) continue;
        if (std::abs(a.values()[i] - b.values()[i]) > tol) return false;
    }
    return true;
}

inline bool is_isentropic(const PureState& a, const PureState& b) {
    if (a.num_parties() != b.num_parties()) throw std::invalid_argument("is_isentropic: party-count mismatch");
    return same_entropies(entropy_vector(a), entropy_vector(b), false);
}

inline bool is_marginally_isentropic(const PureState& a, const PureState& b) {
    if (a.num_parties() != b.num_parties()) {
        throw std::invalid_argument("is_marginally_isentropic: party-count mismatch");
    }
    return same_entropies(entropy_vector(a), entropy_vector(b), true);
}

struct R21Result {
    std::optional<double> ratio;
    std::vector<Partition> unequal; // partitions breaking the size-symmetry precondition
    std::string diagnostic;
};

/// Ratio S_AB / S_A for states whose partial entropies depend only on |X|.
inline R21Result entropy_ratio_r21(const EntropyVector& ev) {
    R21Result r;
    const std::size_t m = ev.num_parties();
    if (m < 3) {
        r.diagnostic = "r21 needs at least three parties";
        return r;
    }
    const double s1 = ev.single(0);
    const double s2 = ev.at(Partition(m, {0, 1}));
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& x = ev.partitions()[i];
        const double ref = x.size() == 1 ? s1 : x.size() == 2 ? s2 : ev.values()[i];
        if (std::abs(ev.values()[i] - ref) > kEntropyTolerance) r.unequal.push_back(x);
    }
    if (!r.unequal.empty()) {
        r.diagnostic = "partial entropies depend on more than |X|; unequal partitions:";
        for (const auto& x : r.unequal) r.diagnostic += " " + x.to_string();
        return r;
    }
    if (s1 <= kEntropyTolerance) {
        r.diagnostic = "single-party entropy is zero";
        return r;
    }
    r.ratio = s2 / s1;
    return r;
}

inline R21Result entropy_ratio_r21(const PureState& s) { return entropy_ratio_r21(entropy_vector(s)); }

} // namespace mpent
