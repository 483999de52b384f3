#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mpent/entropy.hpp"
#include "mpent/state.hpp"

namespace mpent {

// ---------------------------------------------------------------------------
// Steps. Every operator acts on one party's whole local space; builders use
// embed() to target sub-factors inside a party.

/// Unitary or isometry (more rows than columns: the party enlarges its space).
struct LocalUnitary {
    std::size_t party = 0;
    Matrix matrix;
};

/// Complete projective measurement; the outcome label is broadcast to all.
struct LocalMeasurement {
    std::size_t party = 0;
    std::string tag;
    std::vector<Matrix> projectors;
    std::vector<std::string> labels;
};

/// Isometry selected by the broadcast outcomes of earlier measurements.
/// Table keys are the labels of `depends_on` joined with ','.
struct ConditionedUnitary {
    std::size_t party = 0;
    std::vector<std::string> depends_on;
    std::map<std::string, Matrix> table;
};

/// Drops sub-factor `index` of a party whose space is split as `subdims`.
/// The factor must be in a product state with everything else.
struct DiscardSubsystem {
    std::size_t party = 0;
    std::vector<std::size_t> subdims;
    std::size_t index = 0;
};

using ProtocolStep = std::variant<LocalUnitary, LocalMeasurement, ConditionedUnitary, DiscardSubsystem>;
using Protocol = std::vector<ProtocolStep>;

struct Outcome {
    std::string tag;
    std::string label;
};
using Transcript = std::vector<Outcome>;

inline std::string to_string(const Transcript& t) {
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ';';
        s += t[i].tag + "=" + t[i].label;
    }
    return s;
}

struct Branch {
    double probability = 0.0;
    PureState state;
    Transcript transcript;
};

struct ProtocolRun {
    PureState source;
    std::vector<Branch> branches; // sorted by transcript string
};

struct RunOptions {
    bool check_entropy_monotonicity = true; // S_X(source) >= sum_i p_i S_X(branch_i) after every step
    double entropy_tolerance = 1e-8;
    double prune_below = 1e-14;
};

inline constexpr double kStepTolerance = 1e-9;

/// Classical bits broadcast by the protocol: ceil(log2 #outcomes) per measurement.
inline std::size_t classical_bits(const Protocol& p) {
    std::size_t bits = 0;
    for (const auto& s : p)
        if (const auto* m = std::get_if<LocalMeasurement>(&s)) {
            std::size_t b = 0;
            while ((std::size_t{1} << b) < m->projectors.size()) ++b;
            bits += b;
        }
    return bits;
}

namespace detail {

inline std::string step_name(std::size_t i) { return "step " + std::to_string(i); }

inline void validate_step(const ProtocolStep& step, std::size_t i) {
    if (const auto* u = std::get_if<LocalUnitary>(&step)) {
        if (!u->matrix.is_isometry(kStepTolerance)) throw DomainError(step_name(i) + ": matrix is not an isometry");
    } else if (const auto* m = std::get_if<LocalMeasurement>(&step)) {
        if (m->tag.empty()) throw std::invalid_argument(step_name(i) + ": measurement needs a tag");
        if (m->projectors.empty() || m->projectors.size() != m->labels.size()) {
            throw std::invalid_argument(step_name(i) + ": one label per projector required");
        }
        if (std::set<std::string>(m->labels.begin(), m->labels.end()).size() != m->labels.size()) {
            throw std::invalid_argument(step_name(i) + ": duplicate outcome labels");
        }
        const std::size_t d = m->projectors.front().rows();
        Matrix sum(d, d);
        for (const auto& p : m->projectors) {
            if (!p.is_square() || p.rows() != d) throw std::invalid_argument(step_name(i) + ": projector shape mismatch");
            if (p.hermiticity_error() > kStepTolerance || (p * p - p).frobenius_norm() > kStepTolerance) {
                throw DomainError(step_name(i) + ": operator is not an orthogonal projector");
            }
            sum += p;
        }
        if ((sum - Matrix::identity(d)).frobenius_norm() > kStepTolerance) {
            throw DomainError(step_name(i) + ": projectors do not sum to the identity");
        }
    } else if (const auto* c = std::get_if<ConditionedUnitary>(&step)) {
        if (c->depends_on.empty()) throw std::invalid_argument(step_name(i) + ": conditioned step depends on nothing");
        for (const auto& [key, mat] : c->table)
            if (!mat.is_isometry(kStepTolerance)) {
                throw DomainError(step_name(i) + ": conditioned matrix for '" + key + "' is not an isometry");
            }
    } else if (const auto* d = std::get_if<DiscardSubsystem>(&step)) {
        if (d->index >= d->subdims.size()) throw std::invalid_argument(step_name(i) + ": discard index out of range");
    }
}

inline PureState with_party_op(const PureState& s, std::size_t party, const Matrix& op, std::size_t i) {
    if (party >= s.num_parties()) throw std::invalid_argument(step_name(i) + ": party out of range");
    if (op.cols() != s.dim(party)) {
        throw DomainError(step_name(i) + ": operator acts on dimension " + std::to_string(op.cols()) + " but party " +
                          party_name(party) + " has dimension " + std::to_string(s.dim(party)));
    }
    return apply_local(s, party, op);
}

inline PureState discard(const PureState& s, const DiscardSubsystem& d, std::size_t i) {
    if (d.party >= s.num_parties()) throw std::invalid_argument(step_name(i) + ": party out of range");
    if (product(d.subdims) != s.dim(d.party)) {
        throw DomainError(step_name(i) + ": subdims do not multiply to party " + party_name(d.party) + "'s dimension");
    }
    // Split the state into (factor) x (everything else).
    std::size_t inner_left = 1, inner_right = 1;
    for (std::size_t k = 0; k < d.index; ++k) inner_left *= d.subdims[k];
    for (std::size_t k = d.index + 1; k < d.subdims.size(); ++k) inner_right *= d.subdims[k];
    const std::size_t df = d.subdims[d.index];
    std::size_t outer_left = 1, outer_right = 1;
    for (std::size_t k = 0; k < d.party; ++k) outer_left *= s.dim(k);
    for (std::size_t k = d.party + 1; k < s.num_parties(); ++k) outer_right *= s.dim(k);

    const std::size_t rest = s.dimension() / df;
    Matrix c(df, rest);
    std::size_t g = 0;
    for (std::size_t ol = 0; ol < outer_left; ++ol)
        for (std::size_t il = 0; il < inner_left; ++il)
            for (std::size_t f = 0; f < df; ++f)
                for (std::size_t ir = 0; ir < inner_right; ++ir)
                    for (std::size_t orr = 0; orr < outer_right; ++orr, ++g) {
                        const std::size_t col = ((ol * inner_left + il) * inner_right + ir) * outer_right + orr;
                        c(f, col) = s.amplitude(g);
                    }
    const Matrix rho = c * c.adjoint();
    const auto es = hermitian_eigensystem(rho, 1e-9);
    if (es.values.front() < 1.0 - kStepTolerance) {
        throw DomainError(step_name(i) + ": discarded factor of party " + party_name(d.party) +
                          " is entangled with the rest (purity " + std::to_string(es.values.front()) + ")");
    }
    const auto v = es.vectors.column(0);
    std::vector<cplx> out(rest);
    for (std::size_t col = 0; col < rest; ++col) {
        cplx acc = 0.0;
        for (std::size_t f = 0; f < df; ++f) acc += std::conj(v[f]) * c(f, col);
        out[col] = acc;
    }
    std::vector<std::size_t> dims = s.dims();
    dims[d.party] /= df;
    return PureState::normalized(std::move(dims), std::move(out));
}

inline std::string conditioning_key(const ConditionedUnitary& c, const Transcript& t, std::size_t i) {
    std::string key;
    for (std::size_t k = 0; k < c.depends_on.size(); ++k) {
        auto it = std::find_if(t.rbegin(), t.rend(), [&](const Outcome& o) { return o.tag == c.depends_on[k]; });
        if (it == t.rend()) {
            throw DomainError(step_name(i) + ": conditioned on '" + c.depends_on[k] + "' which has not been measured");
        }
        if (k) key += ',';
        key += it->label;
    }
    return key;
}

} // namespace detail

/// Expands every measurement branch of the protocol on `input`. Branches with
/// probability below prune_below are dropped and the rest renormalized.
inline ProtocolRun run(const Protocol& protocol, const PureState& input, const RunOptions& opt = {}) {
    for (std::size_t i = 0; i < protocol.size(); ++i) detail::validate_step(protocol[i], i);

    const bool check = opt.check_entropy_monotonicity && input.num_parties() >= 2;
    std::optional<EntropyVector> source_entropy;
    if (check) source_entropy = entropy_vector(input);

    std::vector<Branch> branches{{1.0, input, {}}};
    for (std::size_t i = 0; i < protocol.size(); ++i) {
        std::vector<Branch> next;
        for (auto& b : branches) {
            std::visit(
                [&](const auto& step) {
                    using T = std::decay_t<decltype(step)>;
                    if constexpr (std::is_same_v<T, LocalUnitary>) {
                        next.push_back({b.probability, detail::with_party_op(b.state, step.party, step.matrix, i),
                                        b.transcript});
                    } else if constexpr (std::is_same_v<T, LocalMeasurement>) {
                        if (step.party >= b.state.num_parties()) {
                            throw std::invalid_argument(detail::step_name(i) + ": party out of range");
                        }
                        if (step.projectors.front().cols() != b.state.dim(step.party)) {
                            throw DomainError(detail::step_name(i) + ": projector dimension does not match party " +
                                              party_name(step.party));
                        }
                        for (std::size_t k = 0; k < step.projectors.size(); ++k) {
                            auto amps = detail::apply_on_party(b.state.dims(), b.state.amplitudes(), step.party,
                                                               step.projectors[k]);
                            const double pk = norm2(amps);
                            if (b.probability * pk < opt.prune_below) continue;
                            Transcript t = b.transcript;
                            t.push_back({step.tag, step.labels[k]});
                            next.push_back({b.probability * pk, PureState::normalized(b.state.dims(), std::move(amps)),
                                            std::move(t)});
                        }
                    } else if constexpr (std::is_same_v<T, ConditionedUnitary>) {
                        const auto key = detail::conditioning_key(step, b.transcript, i);
                        auto it = step.table.find(key);
                        if (it == step.table.end()) {
                            throw DomainError(detail::step_name(i) + ": incomplete conditioning table, no entry for '" +
                                              key + "'");
                        }
                        next.push_back(
                            {b.probability, detail::with_party_op(b.state, step.party, it->second, i), b.transcript});
                    } else {
                        next.push_back({b.probability, detail::discard(b.state, step, i), b.transcript});
                    }
                },
                protocol[i]);
        }
        double total = 0.0;
        for (const auto& b : next) total += b.probability;
        for (auto& b : next) b.probability /= total;
        branches = std::move(next);

        if (check) {
            std::vector<double> avg(source_entropy->size(), 0.0);
            for (const auto& b : branches) {
                const auto ev = entropy_vector(b.state);
                for (std::size_t x = 0; x < avg.size(); ++x) avg[x] += b.probability * ev.values()[x];
            }
            for (std::size_t x = 0; x < avg.size(); ++x) {
                if (avg[x] > source_entropy->values()[x] + opt.entropy_tolerance) {
                    throw DomainError(detail::step_name(i) + ": average partial entropy of " +
                                      source_entropy->partitions()[x].to_string() + " increased from " +
                                      std::to_string(source_entropy->values()[x]) + " to " + std::to_string(avg[x]));
                }
            }
        }
    }
    std::stable_sort(branches.begin(), branches.end(),
                     [](const Branch& a, const Branch& b) { return to_string(a.transcript) < to_string(b.transcript); });
    return {input, std::move(branches)};
}

/// Largest violation of sum_i p_i S_X(branch_i) <= S_X(source) over all X
/// (negative when the inequality holds strictly everywhere).
inline double entropy_monotonicity_slack(const ProtocolRun& r) {
    const auto src = entropy_vector(r.source);
    std::vector<double> avg(src.size(), 0.0);
    for (const auto& b : r.branches) {
        const auto ev = entropy_vector(b.state);
        for (std::size_t x = 0; x < avg.size(); ++x) avg[x] += b.probability * ev.values()[x];
    }
    double worst = -INFINITY;
    for (std::size_t x = 0; x < avg.size(); ++x) worst = std::max(worst, avg[x] - src.values()[x]);
    return worst;
}

// ---------------------------------------------------------------------------
// Operators on sub-factors of a party.

/// Lifts `op` acting on the sub-factors at `positions` (in that order) of a
/// space split as `subdims` to the whole space. `out_dims` gives the output
/// dimension of each acted factor (defaults to unchanged).
inline Matrix embed(const Matrix& op, const std::vector<std::size_t>& subdims, const std::vector<std::size_t>& positions,
                    std::vector<std::size_t> out_dims = {}) {
    if (out_dims.empty())
        for (auto p : positions) out_dims.push_back(subdims.at(p));
    if (out_dims.size() != positions.size()) throw std::invalid_argument("embed: out_dims size mismatch");
    std::size_t din = 1, dout = 1;
    for (std::size_t k = 0; k < positions.size(); ++k) {
        din *= subdims.at(positions[k]);
        dout *= out_dims[k];
    }
    if (op.cols() != din || op.rows() != dout) throw std::invalid_argument("embed: operator shape does not match factors");

    std::vector<std::size_t> new_subdims = subdims;
    for (std::size_t k = 0; k < positions.size(); ++k) new_subdims[positions[k]] = out_dims[k];
    const std::size_t total_in = product(subdims), total_out = product(new_subdims);
    Matrix full(total_out, total_in);

    std::vector<std::size_t> digits(subdims.size(), 0), odig;
    for (std::size_t j = 0; j < total_in; ++j) {
        std::size_t a_in = 0;
        for (auto p : positions) a_in = a_in * subdims[p] + digits[p];
        for (std::size_t a_out = 0; a_out < dout; ++a_out) {
            const cplx v = op(a_out, a_in);
            if (v == cplx{}) continue;
            odig = digits;
            std::size_t rem = a_out;
            for (std::size_t k = positions.size(); k-- > 0;) {
                odig[positions[k]] = rem % out_dims[k];
                rem /= out_dims[k];
            }
            std::size_t i = 0;
            for (std::size_t k = 0; k < new_subdims.size(); ++k) i = i * new_subdims[k] + odig[k];
            full(i, j) = v;
        }
        for (std::size_t k = subdims.size(); k-- > 0;) {
            if (++digits[k] < subdims[k]) break;
            digits[k] = 0;
        }
    }
    return full;
}

/// Projectors onto the computational basis states of the factors at
/// `positions`; labels are the digit strings.
inline LocalMeasurement computational_measurement(std::size_t party, std::string tag,
                                                  const std::vector<std::size_t>& subdims,
                                                  const std::vector<std::size_t>& positions) {
    std::size_t d = 1;
    for (auto p : positions) d *= subdims.at(p);
    LocalMeasurement m{party, std::move(tag), {}, {}};
    for (std::size_t a = 0; a < d; ++a) {
        Matrix pa(d, d);
        pa(a, a) = 1.0;
        m.projectors.push_back(embed(pa, subdims, positions));
        std::string label;
        std::size_t rem = a;
        for (std::size_t k = positions.size(); k-- > 0;) {
            const std::size_t dk = subdims[positions[k]];
            label.insert(0, std::to_string(rem % dk));
            rem /= dk;
        }
        m.labels.push_back(label);
    }
    return m;
}

namespace gates {
inline Matrix I2() { return Matrix::identity(2); }
inline Matrix X() { return Matrix{{0, 1}, {1, 0}}; }
inline Matrix Z() { return Matrix{{1, 0}, {0, -1}}; }
inline Matrix H() {
    const double r = 1.0 / std::sqrt(2.0);
    return Matrix{{r, r}, {r, -r}};
}
// Control is the first (more significant) qubit.
inline Matrix CNOT() { return Matrix{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}; }
} // namespace gates

/// Named sub-factor bookkeeping for protocol builders: which registers each
/// party holds, in order.
class Layout {
  public:
    explicit Layout(std::size_t num_parties) : parties_(num_parties) {}

    std::size_t num_parties() const { return parties_.size(); }

    void add(std::size_t party, std::string name, std::size_t dim) { parties_.at(party).push_back({std::move(name), dim}); }

    std::vector<std::size_t> subdims(std::size_t party) const {
        std::vector<std::size_t> d;
        for (const auto& r : parties_.at(party)) d.push_back(r.dim);
        if (d.empty()) d.push_back(1);
        return d;
    }

    std::size_t dim(std::size_t party) const { return product(subdims(party)); }

    std::size_t position(std::size_t party, const std::string& name) const {
        const auto& regs = parties_.at(party);
        for (std::size_t i = 0; i < regs.size(); ++i)
            if (regs[i].name == name) return i;
        throw std::invalid_argument("Layout: party " + party_name(party) + " holds no register '" + name + "'");
    }

    void set_dim(std::size_t party, const std::string& name, std::size_t dim) {
        parties_.at(party)[position(party, name)].dim = dim;
    }

    /// Replaces one register by several whose dims multiply to its dim.
    void split(std::size_t party, const std::string& name, const std::vector<std::pair<std::string, std::size_t>>& parts) {
        auto& regs = parties_.at(party);
        const std::size_t pos = position(party, name);
        std::size_t d = 1;
        std::vector<Reg> repl;
        for (const auto& [n, dd] : parts) {
            d *= dd;
            repl.push_back({n, dd});
        }
        if (d != regs[pos].dim) throw std::invalid_argument("Layout::split: dimensions do not multiply");
        regs.erase(regs.begin() + static_cast<std::ptrdiff_t>(pos));
        regs.insert(regs.begin() + static_cast<std::ptrdiff_t>(pos), repl.begin(), repl.end());
    }

    /// Emits the discard step for a register and removes it from the layout.
    DiscardSubsystem discard(std::size_t party, const std::string& name) {
        DiscardSubsystem d{party, subdims(party), position(party, name)};
        auto& regs = parties_.at(party);
        regs.erase(regs.begin() + static_cast<std::ptrdiff_t>(d.index));
        return d;
    }

  private:
    struct Reg {
        std::string name;
        std::size_t dim;
    };
    std::vector<std::vector<Reg>> parties_;
};

} // namespace mpent
