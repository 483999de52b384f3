#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mpent/error.hpp"
#include "mpent/linalg.hpp"

namespace mpent {

inline constexpr double kNormTolerance = 1e-10;
// Upper bound on amplitude-vector length for any dense state (64 MiB of amplitudes).
inline constexpr std::size_t kMaxDimension = std::size_t{1} << 22;
inline constexpr std::size_t kMaxParties = 31;

using PartyMask = std::uint32_t;

inline std::string party_name(std::size_t p) {
    if (p < 26) return std::string(1, static_cast<char>('A' + p));
    return "P" + std::to_string(p + 1);
}

inline std::size_t product(std::span<const std::size_t> dims) {
    std::size_t d = 1;
    for (auto x : dims) {
        if (x != 0 && d > kMaxDimension * 64 / x) throw std::invalid_argument("dimension product overflows the dense budget");
        d *= x;
    }
    return d;
}

/// Nontrivial subset X of the parties {0..m-1}; defines the cut X | X-bar.
class Partition {
  public:
    Partition(std::size_t num_parties, PartyMask members) : m_(num_parties), mask_(members) {
        if (num_parties < 2 || num_parties > kMaxParties) {
            throw std::invalid_argument("Partition: party count must be in [2, 31]");
        }
        if (mask_ == 0 || mask_ == full() || (mask_ & ~full()) != 0) {
            throw std::invalid_argument("Partition: subset must be nonempty and proper");
        }
    }
    Partition(std::size_t num_parties, std::initializer_list<std::size_t> members)
        : Partition(num_parties, mask_of(num_parties, std::vector<std::size_t>(members))) {}
    Partition(std::size_t num_parties, const std::vector<std::size_t>& members)
        : Partition(num_parties, mask_of(num_parties, members)) {}

    std::size_t num_parties() const { return m_; }
    PartyMask mask() const { return mask_; }
    std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask_)); }
    bool contains(std::size_t p) const { return p < m_ && ((mask_ >> p) & 1U); }

    std::vector<std::size_t> members() const {
        std::vector<std::size_t> out;
        for (std::size_t p = 0; p < m_; ++p)
            if (contains(p)) out.push_back(p);
        return out;
    }

    Partition complement() const { return Partition(m_, full() & ~mask_); }

    // Smaller side; on ties, the side without party A.
    Partition canonical() const {
        const std::size_t k = size();
        if (2 * k < m_) return *this;
        if (2 * k > m_) return complement();
        return contains(0) ? complement() : *this;
    }
    bool is_canonical() const { return canonical().mask_ == mask_; }

    std::string to_string() const {
        std::string s;
        for (auto p : members()) s += party_name(p);
        return s;
    }

    friend bool operator==(const Partition& a, const Partition& b) { return a.m_ == b.m_ && a.mask_ == b.mask_; }

    // Ordering used for tables: by size, then lexicographic member list.
    friend bool operator<(const Partition& a, const Partition& b) {
        if (a.m_ != b.m_) return a.m_ < b.m_;
        if (a.size() != b.size()) return a.size() < b.size();
        return a.members() < b.members();
    }

  private:
    PartyMask full() const { return m_ >= 32 ? ~PartyMask{0} : ((PartyMask{1} << m_) - 1); }

    static PartyMask mask_of(std::size_t m, const std::vector<std::size_t>& members) {
        PartyMask mk = 0;
        for (auto p : members) {
            if (p >= m) throw std::invalid_argument("Partition: party index out of range");
            mk |= PartyMask{1} << p;
        }
        return mk;
    }

    std::size_t m_;
    PartyMask mask_;
};

/// The 2^(m-1)-1 canonical nontrivial partitions of m parties in table order.
inline std::vector<Partition> canonical_partitions(std::size_t m) {
    if (m < 2 || m > 20) throw std::invalid_argument("canonical_partitions: party count must be in [2, 20]");
    std::vector<Partition> out;
    const PartyMask full = (PartyMask{1} << m) - 1;
    for (PartyMask mk = 1; mk < full; ++mk) {
        Partition p(m, mk);
        if (p.is_canonical()) out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Normalized amplitude tensor over m parties. Party A is the most
/// significant mixed-radix digit.
class PureState {
  public:
    PureState(std::vector<std::size_t> dims, std::vector<cplx> amplitudes)
        : dims_(std::move(dims)), amps_(std::move(amplitudes)) {
        validate_shape();
        const double n = std::sqrt(norm2(amps_));
        if (std::abs(n - 1.0) > kNormTolerance) {
            throw DomainError("PureState: amplitudes are not normalized (norm " + std::to_string(n) + ")");
        }
    }

    // Normalizes the given amplitudes; throws if they are all zero.
    static PureState normalized(std::vector<std::size_t> dims, std::vector<cplx> amplitudes) {
        const double n = std::sqrt(norm2(amplitudes));
        if (!(n > 1e-300)) throw std::invalid_argument("PureState: all amplitudes are zero");
        for (auto& a : amplitudes) a /= n;
        return PureState(std::move(dims), std::move(amplitudes));
    }

    std::size_t num_parties() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim(std::size_t party) const { return dims_.at(party); }
    std::size_t dimension() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    cplx amplitude(std::size_t index) const { return amps_.at(index); }

    std::size_t index_of(std::span<const std::size_t> digits) const {
        if (digits.size() != dims_.size()) throw std::invalid_argument("index_of: wrong number of digits");
        std::size_t idx = 0;
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            if (digits[k] >= dims_[k]) throw std::invalid_argument("index_of: digit out of range");
            idx = idx * dims_[k] + digits[k];
        }
        return idx;
    }

    std::vector<std::size_t> digits_of(std::size_t index) const {
        std::vector<std::size_t> d(dims_.size());
        for (std::size_t k = dims_.size(); k-- > 0;) {
            d[k] = index % dims_[k];
            index /= dims_[k];
        }
        return d;
    }

  private:
    void validate_shape() const {
        if (dims_.empty()) throw std::invalid_argument("PureState: at least one party is required");
        if (dims_.size() > kMaxParties) throw std::invalid_argument("PureState: too many parties");
        for (auto d : dims_)
            if (d == 0) throw std::invalid_argument("PureState: local dimensions must be positive");
        const std::size_t total = product(dims_);
        if (total > kMaxDimension) throw DomainError("PureState: dimension exceeds the dense budget");
        if (total != amps_.size()) {
            throw std::invalid_argument("PureState: amplitude count " + std::to_string(amps_.size()) +
                                        " != product of dims " + std::to_string(total));
        }
    }

    std::vector<std::size_t> dims_;
    std::vector<cplx> amps_;
};

struct BasisTerm {
    std::vector<std::size_t> basis;
    cplx amplitude;
};

/// Builds a state from an unnormalized list of basis terms. Repeated basis
/// strings accumulate.
inline PureState make_state(const std::vector<std::size_t>& dims, const std::vector<BasisTerm>& terms) {
    if (dims.empty()) throw std::invalid_argument("make_state: no parties");
    const std::size_t total = product(dims);
    if (total > kMaxDimension) throw DomainError("make_state: dimension exceeds the dense budget");
    std::vector<cplx> amps(total);
    for (const auto& t : terms) {
        if (t.basis.size() != dims.size()) throw std::invalid_argument("make_state: basis string has wrong length");
        std::size_t idx = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) {
            if (t.basis[k] >= dims[k]) {
                throw std::invalid_argument("make_state: digit " + std::to_string(t.basis[k]) + " out of range for party " +
                                            party_name(k));
            }
            idx = idx * dims[k] + t.basis[k];
        }
        amps[idx] += t.amplitude;
    }
    if (norm2(amps) == 0.0) throw std::invalid_argument("make_state: all amplitudes are zero");
    return PureState::normalized(dims, std::move(amps));
}

namespace detail {

// For each global index, the index within the parties selected by `mask`
// (and within the rest), both in mixed radix preserving party order.
struct SplitIndex {
    std::size_t dim_in = 1;
    std::size_t dim_out = 1;
    std::vector<std::size_t> in;
    std::vector<std::size_t> out;
};

inline SplitIndex split_index(const std::vector<std::size_t>& dims, PartyMask mask) {
    SplitIndex s;
    for (std::size_t k = 0; k < dims.size(); ++k) ((mask >> k) & 1U ? s.dim_in : s.dim_out) *= dims[k];
    const std::size_t total = s.dim_in * s.dim_out;
    s.in.resize(total);
    s.out.resize(total);
    std::vector<std::size_t> digits(dims.size(), 0);
    for (std::size_t g = 0; g < total; ++g) {
        std::size_t a = 0, b = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) {
            if ((mask >> k) & 1U) a = a * dims[k] + digits[k];
            else b = b * dims[k] + digits[k];
        }
        s.in[g] = a;
        s.out[g] = b;
        for (std::size_t k = dims.size(); k-- > 0;) {
            if (++digits[k] < dims[k]) break;
            digits[k] = 0;
        }
    }
    return s;
}

// Applies `op` (rows x cols, cols == dims[party]) to one party. Result is
// unnormalized and has dims[party] replaced by op.rows().
inline std::vector<cplx> apply_on_party(const std::vector<std::size_t>& dims, std::span<const cplx> amps,
                                        std::size_t party, const Matrix& op) {
    if (party >= dims.size()) throw std::invalid_argument("apply_on_party: party out of range");
    if (op.cols() != dims[party]) {
        throw std::invalid_argument("apply_on_party: operator has " + std::to_string(op.cols()) +
                                    " columns but party " + party_name(party) + " has dimension " +
                                    std::to_string(dims[party]));
    }
    std::size_t left = 1, right = 1;
    for (std::size_t k = 0; k < party; ++k) left *= dims[k];
    for (std::size_t k = party + 1; k < dims.size(); ++k) right *= dims[k];
    const std::size_t din = op.cols(), dout = op.rows();
    std::vector<cplx> out(left * dout * right);
    for (std::size_t l = 0; l < left; ++l)
        for (std::size_t j = 0; j < din; ++j)
            for (std::size_t r = 0; r < right; ++r) {
                const cplx a = amps[(l * din + j) * right + r];
                if (a == cplx{}) continue;
                for (std::size_t i = 0; i < dout; ++i) {
                    const cplx o = op(i, j);
                    if (o != cplx{}) out[(l * dout + i) * right + r] += o * a;
                }
            }
    return out;
}

} // namespace detail

/// Regroups subsystems into new parties: old party i goes to new party
/// assignment[i]. Subsystems landing on one party merge in old-party order;
/// new parties with no subsystem get dimension 1.
inline PureState regroup(const PureState& s, const std::vector<std::size_t>& assignment) {
    if (assignment.size() != s.num_parties()) {
        throw std::invalid_argument("regroup: assignment must name a party for every subsystem");
    }
    const std::size_t new_m = *std::max_element(assignment.begin(), assignment.end()) + 1;
    if (new_m > kMaxParties) throw std::invalid_argument("regroup: too many parties");
    std::vector<std::size_t> new_dims(new_m, 1);
    for (std::size_t i = 0; i < assignment.size(); ++i) new_dims[assignment[i]] *= s.dim(i);

    // Order subsystems by (new party, old index) to get the new digit order.
    std::vector<std::size_t> order(s.num_parties());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return assignment[a] < assignment[b]; });
    std::vector<std::size_t> stride(s.num_parties());
    std::size_t st = 1;
    for (std::size_t k = order.size(); k-- > 0;) {
        stride[order[k]] = st;
        st *= s.dim(order[k]);
    }

    std::vector<cplx> out(s.dimension());
    std::vector<std::size_t> digits(s.num_parties(), 0);
    const auto& dims = s.dims();
    for (std::size_t g = 0; g < s.dimension(); ++g) {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < digits.size(); ++k) idx += digits[k] * stride[k];
        out[idx] = s.amplitude(g);
        for (std::size_t k = dims.size(); k-- > 0;) {
            if (++digits[k] < dims[k]) break;
            digits[k] = 0;
        }
    }
    return PureState(std::move(new_dims), std::move(out));
}

/// a (x) b where a's parties keep their labels and b's party i is held by
/// party_map[i]. A party receiving several subsystems gets the product
/// dimension, a's subsystems first.
inline PureState tensor(const PureState& a, const PureState& b, const std::vector<std::size_t>& party_map) {
    if (party_map.size() != b.num_parties()) {
        throw std::invalid_argument("tensor: party_map has " + std::to_string(party_map.size()) + " labels for " +
                                    std::to_string(b.num_parties()) + " parties");
    }
    std::vector<std::size_t> joint_dims = a.dims();
    joint_dims.insert(joint_dims.end(), b.dims().begin(), b.dims().end());
    if (product(joint_dims) > kMaxDimension) throw DomainError("tensor: result exceeds the dense budget");
    std::vector<std::size_t> assignment(a.num_parties());
    std::iota(assignment.begin(), assignment.end(), 0);
    assignment.insert(assignment.end(), party_map.begin(), party_map.end());
    return regroup(PureState(std::move(joint_dims), kron(a.amplitudes(), b.amplitudes())), assignment);
}

/// Same-party tensor product: b's party i is held by party i.
inline PureState tensor(const PureState& a, const PureState& b) {
    std::vector<std::size_t> map(b.num_parties());
    std::iota(map.begin(), map.end(), 0);
    return tensor(a, b, map);
}

inline PureState tensor_power(const PureState& s, std::size_t n) {
    if (n == 0) throw std::invalid_argument("tensor_power: n must be positive");
    PureState out = s;
    for (std::size_t i = 1; i < n; ++i) out = tensor(out, s);
    return out;
}

/// Removes a party whose local dimension is 1.
inline PureState drop_party(const PureState& s, std::size_t party) {
    if (party >= s.num_parties()) throw std::invalid_argument("drop_party: party out of range");
    if (s.dim(party) != 1) throw std::invalid_argument("drop_party: party " + party_name(party) + " is not trivial");
    std::vector<std::size_t> dims = s.dims();
    dims.erase(dims.begin() + static_cast<std::ptrdiff_t>(party));
    return PureState(std::move(dims), std::vector<cplx>(s.amplitudes().begin(), s.amplitudes().end()));
}

/// Applies a local isometry (or unitary) to one party and renormalizes.
inline PureState apply_local(const PureState& s, std::size_t party, const Matrix& op) {
    auto amps = detail::apply_on_party(s.dims(), s.amplitudes(), party, op);
    std::vector<std::size_t> dims = s.dims();
    dims[party] = op.rows();
    return PureState::normalized(std::move(dims), std::move(amps));
}

class DensityMatrix {
  public:
    struct trusted_t {};
    static constexpr trusted_t trusted{};

    DensityMatrix(std::vector<std::size_t> dims, Matrix m) : dims_(std::move(dims)), m_(std::move(m)) {
        check_shape();
        if (m_.hermiticity_error() > 1e-10) throw DomainError("DensityMatrix: not Hermitian");
        if (std::abs(m_.trace() - cplx{1.0}) > 1e-10) throw DomainError("DensityMatrix: trace is not 1");
        const auto ev = hermitian_eigenvalues(m_);
        if (!ev.empty() && ev.back() < -1e-10) throw DomainError("DensityMatrix: negative eigenvalue");
    }
    // Skips the spectral checks; for matrices positive by construction.
    DensityMatrix(std::vector<std::size_t> dims, Matrix m, trusted_t) : dims_(std::move(dims)), m_(std::move(m)) {
        check_shape();
    }

    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t num_parties() const { return dims_.size(); }
    std::size_t dimension() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }

  private:
    void check_shape() const {
        if (!m_.is_square() || product(dims_) != m_.rows()) {
            throw std::invalid_argument("DensityMatrix: matrix size does not match dims");
        }
    }
    std::vector<std::size_t> dims_;
    Matrix m_;
};

inline DensityMatrix projector_of(const PureState& s) {
    return DensityMatrix(s.dims(), Matrix::projector(s.amplitudes()), DensityMatrix::trusted);
}

/// The dim_X x dim_Xbar coefficient matrix of the state across the cut.
inline Matrix coefficient_matrix(const PureState& s, PartyMask keep) {
    const auto split = detail::split_index(s.dims(), keep);
    Matrix m(split.dim_in, split.dim_out);
    for (std::size_t g = 0; g < s.dimension(); ++g) m(split.in[g], split.out[g]) = s.amplitude(g);
    return m;
}

inline std::vector<std::size_t> dims_of(const std::vector<std::size_t>& dims, PartyMask mask) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < dims.size(); ++k)
        if ((mask >> k) & 1U) out.push_back(dims[k]);
    return out;
}

/// rho_X = tr_{X-bar} |psi><psi|.
inline DensityMatrix partial_trace(const PureState& s, const Partition& keep) {
    if (keep.num_parties() != s.num_parties()) throw std::invalid_argument("partial_trace: partition party count mismatch");
    const Matrix c = coefficient_matrix(s, keep.mask());
    Matrix rho(c.rows(), c.rows());
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = i; j < c.rows(); ++j) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < c.cols(); ++k) acc += c(i, k) * std::conj(c(j, k));
            rho(i, j) = acc;
            rho(j, i) = std::conj(acc);
        }
    return DensityMatrix(dims_of(s.dims(), keep.mask()), std::move(rho), DensityMatrix::trusted);
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const Partition& keep) {
    if (keep.num_parties() != rho.num_parties()) {
        throw std::invalid_argument("partial_trace: partition party count mismatch");
    }
    const auto split = detail::split_index(rho.dims(), keep.mask());
    const std::size_t n = rho.dimension();
    Matrix out(split.dim_in, split.dim_in);
    for (std::size_t g = 0; g < n; ++g)
        for (std::size_t h = 0; h < n; ++h)
            if (split.out[g] == split.out[h]) out(split.in[g], split.in[h]) += rho.matrix()(g, h);
    return DensityMatrix(dims_of(rho.dims(), keep.mask()), std::move(out), DensityMatrix::trusted);
}

/// <psi|rho|psi>.
inline double fidelity(const DensityMatrix& rho, const PureState& psi) {
    if (rho.dims() != psi.dims()) throw std::invalid_argument("fidelity: dimension mismatch");
    const auto v = rho.matrix() * psi.amplitudes();
    return std::clamp(inner(psi.amplitudes(), v).real(), 0.0, 1.0);
}

/// |<a|b>|^2 for pure states of identical shape.
inline double fidelity(const PureState& a, const PureState& b) {
    if (a.dims() != b.dims()) throw std::invalid_argument("fidelity: dimension mismatch");
    return std::clamp(std::norm(inner(a.amplitudes(), b.amplitudes())), 0.0, 1.0);
}

} // namespace mpent
